#include "qnr/learn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qnr/rng.hpp"

namespace qnr {

namespace {

double batch_cost(const TreeEvaluator& ev, const Dataset& ds,
                  const std::vector<std::size_t>& idx) {
  double c = 0.0;
  for (auto i : idx) {
    const Mat diff = ev.forward(ds[i].inputs) - ds[i].target;
    c += norm2(diff) * norm2(diff);
  }
  return c / static_cast<double>(idx.size());
}

std::vector<std::size_t> all_indices(const Dataset& ds) {
  std::vector<std::size_t> idx(ds.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

GradientRecord batch_gradient(const TreeEvaluator& ev, const Quiver& q, const DimData& dims,
                              Field field, const Dataset& ds,
                              const std::vector<std::size_t>& idx) {
  GradientRecord g = zero_gradient(q, dims, field);
  const double inv_b = 1.0 / static_cast<double>(idx.size());
  for (auto i : idx) {
    const Mat out = ev.forward(ds[i].inputs);
    const Mat seed = cplx(2.0 * inv_b) * (out - ds[i].target);
    g.accumulate(ev.backprop(ds[i].inputs, seed));
  }
  return g;
}

// Chart gradient covector: plain d/dx entries in real mode, the conjugate
// (descent) gradient dJ/dzbar in complex mode.
std::vector<cplx> chart_gradient(const GradientRecord& g, const DimData& dims,
                                 const ChartCoords& chart) {
  std::vector<cplx> out;
  out.reserve(chart.size());
  for (const auto& c : chart.coords) {
    const auto& src = (g.field == Field::real)
                          ? (c.kind == ChartCoord::Kind::weight ? g.d_weights : g.d_framings)
                          : (c.kind == ChartCoord::Kind::weight ? g.dbar_weights : g.dbar_framings);
    const Mat& m = src.at(c.id);
    const std::size_t col = (c.kind == ChartCoord::Kind::bias) ? dims.dim(c.id) + c.col : c.col;
    out.push_back(m(c.row, col));
  }
  return out;
}

struct StepContext {
  ChartCoords chart;
  std::vector<std::size_t> batch;
};

std::pair<FramedRep, StepDiag> step_impl(const AlgorithmTree& t, const Quiver& q,
                                         const DimData& dims, const FramedRep& r,
                                         const AlphaWeights& alpha, const Dataset& ds,
                                         const TrainConfig& cfg, const StepContext& ctx) {
  if (!(cfg.lr > 0.0)) throw Error("learning rate must be positive");
  StepDiag diag;
  const MetricState m = metric_state(q, dims, r, alpha);
  diag.min_gram_eig = min_gram_eigenvalue(m);
  TreeEvaluator ev(t, q, dims, r, m);
  diag.cost_before = batch_cost(ev, ds, ctx.batch);
  const GradientRecord grad = batch_gradient(ev, q, dims, r.field, ds, ctx.batch);
  const std::vector<cplx> gvec = chart_gradient(grad, dims, ctx.chart);
  const std::size_t P = ctx.chart.size();
  double gnorm = 0.0;
  for (const auto& z : gvec) gnorm += std::norm(z);
  diag.grad_norm = std::sqrt(gnorm);

  // preconditioner
  std::vector<cplx> delta(P);
  if (alpha.all_zero()) {
    // flat metric: exact plain gradient descent
    for (std::size_t i = 0; i < P; ++i) delta[i] = -gvec[i];
  } else {
    Mat G = kahler_gram(q, dims, r, alpha, ctx.chart);
    if (r.field == Field::real) G = real_part(G);
    // The moduli Gram is PSD for positive path weights but negative
    // semidefinite on hyperbolic-type loci; descent preconditions with the
    // positive metric, so flip by the trace sign and, if still indefinite,
    // shift to the spectral floor.
    if (trace(G).real() < 0.0) G = -G;
    const double lam = (cfg.ridge >= 0.0)
                           ? cfg.ridge
                           : 1e-8 * std::abs(trace(G).real()) /
                                 static_cast<double>(std::max<std::size_t>(P, 1));
    Mat Gs = G;
    for (std::size_t i = 0; i < P; ++i) Gs(i, i) += lam;
    auto chol = cholesky(Gs);
    if (!chol.ok) {
      const double mn = min_eigenvalue_hermitian(G);
      Gs = G;
      for (std::size_t i = 0; i < P; ++i) Gs(i, i) += lam + std::max(0.0, -mn) + 1e-12;
      chol = cholesky(Gs);
      if (!chol.ok)
        throw StepRejected("metric solve failed: preconditioner not positive definite");
    }
    Mat rhs(P, 1);
    for (std::size_t i = 0; i < P; ++i) rhs(i, 0) = -gvec[i];
    const Mat sol = cholesky_solve(chol.L, rhs);
    for (std::size_t i = 0; i < P; ++i) delta[i] = sol(i, 0);
  }

  const std::vector<cplx> coords = ctx.chart.flatten(q, dims, r);
  double scale = cfg.lr;
  for (std::size_t attempt = 0; attempt <= 20; ++attempt) {
    std::vector<cplx> trial(P);
    for (std::size_t i = 0; i < P; ++i) {
      cplx step = cplx(scale) * delta[i];
      if (r.field == Field::real) step = step.real();
      trial[i] = coords[i] + step;
    }
    FramedRep rnext = ctx.chart.unflatten(q, dims, r, trial);
    if (is_space_like(q, dims, rnext, alpha)) {
      bool accept = true;
      if (cfg.backtrack) {
        const MetricState mn = metric_state(q, dims, rnext, alpha);
        TreeEvaluator evn(t, q, dims, rnext, mn);
        const double cn = batch_cost(evn, ds, ctx.batch);
        accept = (cn <= diag.cost_before);
        if (accept) diag.cost_after = cn;
      }
      if (accept) {
        if (!cfg.backtrack) {
          const MetricState mn = metric_state(q, dims, rnext, alpha);
          TreeEvaluator evn(t, q, dims, rnext, mn);
          diag.cost_after = batch_cost(evn, ds, ctx.batch);
        }
        double snorm = 0.0;
        for (std::size_t i = 0; i < P; ++i) snorm += std::norm(trial[i] - coords[i]);
        diag.step_norm = std::sqrt(snorm);
        diag.halvings = attempt;
        return {std::move(rnext), diag};
      }
    }
    scale *= 0.5;
  }
  throw StepRejected("step halving exhausted without an acceptable iterate");
}

}  // namespace

double cost(const AlgorithmTree& t, const Quiver& q, const DimData& dims, const FramedRep& r,
            const AlphaWeights& alpha, const Dataset& ds) {
  const MetricState m = metric_state(q, dims, r, alpha);
  TreeEvaluator ev(t, q, dims, r, m);
  return batch_cost(ev, ds, all_indices(ds));
}

GradientRecord euclidean_gradient(const AlgorithmTree& t, const Quiver& q, const DimData& dims,
                                  const FramedRep& r, const AlphaWeights& alpha,
                                  const Dataset& ds) {
  const MetricState m = metric_state(q, dims, r, alpha);
  TreeEvaluator ev(t, q, dims, r, m);
  return batch_gradient(ev, q, dims, r.field, ds, all_indices(ds));
}

std::pair<FramedRep, StepDiag> riemannian_step(const AlgorithmTree& t, const Quiver& q,
                                               const DimData& dims, const FramedRep& r,
                                               const AlphaWeights& alpha, const Dataset& ds,
                                               const TrainConfig& cfg) {
  StepContext ctx{ChartCoords::standard(q, dims), all_indices(ds)};
  return step_impl(t, q, dims, r, alpha, ds, cfg, ctx);
}

namespace {

std::vector<double> alpha_flat(const AlphaWeights& a) {
  std::vector<double> out;
  for (const auto& [v, row] : a.values) out.insert(out.end(), row.begin(), row.end());
  return out;
}

// Central finite differences of the full-dataset cost against each alpha
// weight; sides that leave the space-like locus contribute nothing.
void alpha_fd_step(const AlgorithmTree& t, const Quiver& q, const DimData& dims,
                   const FramedRep& r, AlphaWeights& alpha, const Dataset& ds, double lr) {
  const double h = 1e-4;
  AlphaWeights grad = alpha;
  for (auto& [v, row] : grad.values) std::fill(row.begin(), row.end(), 0.0);
  for (auto& [v, row] : alpha.values) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      const double save = row[i];
      double cp = 0.0, cm = 0.0;
      bool ok = true;
      try {
        row[i] = save + h;
        cp = cost(t, q, dims, r, alpha, ds);
        row[i] = save - h;
        cm = cost(t, q, dims, r, alpha, ds);
      } catch (const NotSpaceLike&) {
        ok = false;
      }
      row[i] = save;
      if (ok) grad.values[v][i] = (cp - cm) / (2.0 * h);
    }
  }
  for (auto& [v, row] : alpha.values)
    for (std::size_t i = 0; i < row.size(); ++i)
      row[i] = std::clamp(row[i] - lr * grad.values[v][i], -1.0, 1.0);
}

}  // namespace

TrainResult train(const AlgorithmTree& t, const Quiver& q, const DimData& dims,
                  const FramedRep& r0, const AlphaWeights& alpha0, const Dataset& ds,
                  const TrainConfig& cfg) {
  TrainResult res{r0, alpha0, {}};
  if (cfg.epochs == 0) return res;
  if (ds.empty()) throw Error("train: empty dataset");

  FramedRep r = gauge_fix(q, dims, r0).first;
  AlphaWeights alpha = alpha0;
  StepContext ctx{ChartCoords::standard(q, dims), {}};
  Rng shuffle_rng = Rng(cfg.seed).split(0x5151);
  const std::size_t bs = (cfg.batch_size == 0 || cfg.batch_size > ds.size()) ? ds.size()
                                                                             : cfg.batch_size;
  std::vector<std::size_t> order = all_indices(ds);
  std::size_t step_counter = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (bs < ds.size()) {
      for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[shuffle_rng.below(i)]);
    }
    for (std::size_t s0 = 0; s0 < order.size(); s0 += bs) {
      ctx.batch.assign(order.begin() + s0,
                       order.begin() + std::min(order.size(), s0 + bs));
      auto [rnext, diag] = step_impl(t, q, dims, r, alpha, ds, cfg, ctx);
      r = std::move(rnext);
      ++step_counter;
      if (cfg.refix_period != 0 && step_counter % cfg.refix_period == 0)
        r = gauge_fix(q, dims, r).first;
      if (cfg.learn_alpha) alpha_fd_step(t, q, dims, r, alpha, ds, cfg.lr);

      TraceRow row;
      row.epoch = epoch;
      row.step = step_counter;
      row.cost = cost(t, q, dims, r, alpha, ds);
      row.grad_norm = diag.grad_norm;
      row.step_norm = diag.step_norm;
      row.min_gram_eig = diag.min_gram_eig;
      if (cfg.learn_alpha) row.alpha_snapshot = alpha_flat(alpha);
      res.trace.rows.push_back(std::move(row));
    }
  }
  res.rep = std::move(r);
  res.alpha = std::move(alpha);
  return res;
}

}  // namespace qnr
