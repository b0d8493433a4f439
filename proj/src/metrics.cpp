#include "qnr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qnr {

AlphaWeights AlphaWeights::constant(const Quiver& q, double value) {
  AlphaWeights a;
  for (const auto& v : q.vertices()) a.values[v].assign(q.paths_into(v).size(), value);
  return a;
}

AlphaWeights AlphaWeights::moduli(const Quiver& q) { return constant(q, 1.0); }
AlphaWeights AlphaWeights::euclidean(const Quiver& q) { return constant(q, 0.0); }
AlphaWeights AlphaWeights::hyperbolic(const Quiver& q) { return constant(q, -1.0); }

double AlphaWeights::at(const std::string& vertex, std::size_t path_index) const {
  auto it = values.find(vertex);
  if (it == values.end() || path_index >= it->second.size())
    throw MetricUnavailable("alpha weight missing for vertex '" + vertex + "'");
  return it->second[path_index];
}

void AlphaWeights::check_keys(const Quiver& q) const {
  if (values.size() != q.vertices().size())
    throw MetricUnavailable("alpha weights: vertex set mismatch");
  for (const auto& v : q.vertices()) {
    auto it = values.find(v);
    if (it == values.end() || it->second.size() != q.paths_into(v).size())
      throw MetricUnavailable("alpha weights at '" + v + "' not aligned with the path set");
  }
}

bool AlphaWeights::all_zero() const {
  for (const auto& [v, row] : values)
    for (double a : row)
      if (a != 0.0) return false;
  return true;
}

namespace {

// Split a framing into the frozen leading block and the bias block.
std::pair<Mat, Mat> split_framing(const Mat& e, std::size_t d) {
  const std::size_t k = std::min(d, e.cols());
  return {col_block(e, 0, k), col_block(e, k, e.cols())};
}

}  // namespace

Mat gram(const Quiver& q, const DimData& dims, const FramedRep& r, const std::string& vertex,
         const AlphaWeights& alpha) {
  const std::size_t d = dims.dim(vertex);
  const Mat& e = r.framing(vertex);
  if (e.rows() != d) throw ShapeMismatch("framing at '" + vertex + "' has wrong row count");
  auto [eps, bias] = split_framing(e, d);
  Mat g(d, d);
  if (eps.cols() > 0) gemm_nc_acc(g, 1.0, eps, eps);
  const double alpha_e = alpha.at(vertex, 0);
  if (bias.cols() > 0 && alpha_e != 0.0) gemm_nc_acc(g, alpha_e, bias, bias);
  const auto& paths = q.paths_into(vertex);
  for (std::size_t idx = 1; idx < paths.size(); ++idx) {
    const Path& p = paths[idx];
    if (!q.is_source(q.path_source(p))) continue;
    const double a = alpha.at(vertex, idx);
    if (a == 0.0) continue;
    const Mat m = eval_path(q, r, p);
    if (m.cols() == 0) continue;  // unframed source contributes nothing
    gemm_nc_acc(g, a, m, m);
  }
  return hermitize(g);
}

const VertexMetric& MetricState::at(const std::string& v) const {
  auto it = vertex.find(v);
  if (it == vertex.end()) throw MetricUnavailable("no metric computed at vertex '" + v + "'");
  return it->second;
}

std::uint64_t rep_fingerprint(const FramedRep& r) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* p, std::size_t n) {
    const unsigned char* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 0x100000001b3ULL;
    }
  };
  const int field_tag = (r.field == Field::real) ? 0 : 1;
  mix(&field_tag, sizeof(field_tag));
  for (const auto& [id, m] : r.weights) {
    mix(id.data(), id.size());
    mix(m.data(), m.size() * sizeof(cplx));
  }
  for (const auto& [id, m] : r.framings) {
    mix(id.data(), id.size());
    mix(m.data(), m.size() * sizeof(cplx));
  }
  return h;
}

MetricState metric_state(const Quiver& q, const DimData& dims, const FramedRep& r,
                         const AlphaWeights& alpha) {
  validate_shapes(q, dims, r);
  alpha.check_keys(q);
  MetricState st;
  st.alpha = alpha;
  st.rep_fingerprint = rep_fingerprint(r);
  for (const auto& v : q.vertices()) {
    VertexMetric vm;
    vm.gram = gram(q, dims, r, v, alpha);
    auto chol = cholesky(vm.gram);
    if (!chol.ok) throw NotSpaceLike(v, min_eigenvalue_hermitian(vm.gram));
    vm.chol = std::move(chol.L);
    vm.H = cholesky_inverse(vm.chol);
    vm.logdet = cholesky_logdet(vm.chol);
    st.vertex[v] = std::move(vm);
  }
  return st;
}

bool is_space_like(const Quiver& q, const DimData& dims, const FramedRep& r,
                   const AlphaWeights& alpha) {
  try {
    metric_state(q, dims, r, alpha);
    return true;
  } catch (const NotSpaceLike&) {
    return false;
  }
}

double min_gram_eigenvalue(const MetricState& m) {
  double mn = std::numeric_limits<double>::infinity();
  for (const auto& [v, vm] : m.vertex) mn = std::min(mn, min_eigenvalue_hermitian(vm.gram));
  return mn;
}

ChartCoords ChartCoords::standard(const Quiver& q, const DimData& dims) {
  ChartCoords c;
  for (const auto& a : q.arrows()) {
    const std::size_t rows = dims.dim(a.head), cols = dims.dim(a.tail);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j)
        c.coords.push_back({ChartCoord::Kind::weight, a.id, i, j});
  }
  for (const auto& v : q.vertices()) {
    const std::size_t d = dims.dim(v), n = dims.framing(v);
    if (n < d) throw RankDeficientFraming("chart requires n_i >= d_i at vertex '" + v + "'");
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j + d < n; ++j)
        c.coords.push_back({ChartCoord::Kind::bias, v, i, j});
  }
  return c;
}

std::vector<cplx> ChartCoords::flatten(const Quiver& /*q*/, const DimData& dims,
                                       const FramedRep& r) const {
  std::vector<cplx> out;
  out.reserve(coords.size());
  for (const auto& c : coords) {
    if (c.kind == ChartCoord::Kind::weight) {
      out.push_back(r.weight(c.id)(c.row, c.col));
    } else {
      const std::size_t d = dims.dim(c.id);
      out.push_back(r.framing(c.id)(c.row, d + c.col));
    }
  }
  return out;
}

FramedRep ChartCoords::unflatten(const Quiver& /*q*/, const DimData& dims, const FramedRep& base,
                                 const std::vector<cplx>& values) const {
  if (values.size() != coords.size()) throw ShapeMismatch("unflatten: coordinate count mismatch");
  FramedRep r = base;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const auto& c = coords[i];
    if (c.kind == ChartCoord::Kind::weight) {
      r.weights.at(c.id)(c.row, c.col) = values[i];
    } else {
      const std::size_t d = dims.dim(c.id);
      r.framings.at(c.id)(c.row, d + c.col) = values[i];
    }
  }
  return r;
}

namespace {

// One additive piece alpha_t * M_t M_t^H of a vertex Gram, with the holomorphic
// derivatives of M_t against every chart coordinate that touches it.
struct GramTerm {
  double alpha;
  Mat m;
  std::map<std::size_t, Mat> deriv;  // coord index -> dM/dz
};

}  // namespace

Mat kahler_gram(const Quiver& q, const DimData& dims, const FramedRep& r,
                const AlphaWeights& alpha, const ChartCoords& chart) {
  validate_shapes(q, dims, r);
  alpha.check_keys(q);
  const std::size_t P = chart.size();
  Mat G(P, P);

  // coordinate lookup tables
  std::map<std::string, std::map<std::pair<std::size_t, std::size_t>, std::size_t>> wcoord, bcoord;
  for (std::size_t idx = 0; idx < P; ++idx) {
    const auto& c = chart.coords[idx];
    if (c.kind == ChartCoord::Kind::weight)
      wcoord[c.id][{c.row, c.col}] = idx;
    else
      bcoord[c.id][{c.row, c.col}] = idx;
  }

  for (const auto& v : q.vertices()) {
    const std::size_t d = dims.dim(v);
    std::vector<GramTerm> terms;

    auto add_bias_term = [&](const std::string& vert, double a) {
      const Mat& e = r.framing(vert);
      const std::size_t dd = dims.dim(vert);
      if (e.cols() <= dd) return;
      GramTerm t;
      t.alpha = a;
      t.m = col_block(e, dd, e.cols());
      auto itv = bcoord.find(vert);
      if (itv != bcoord.end()) {
        for (const auto& [rc, idx] : itv->second) {
          Mat dm(t.m.rows(), t.m.cols());
          dm(rc.first, rc.second) = 1.0;
          t.deriv[idx] = std::move(dm);
        }
      }
      terms.push_back(std::move(t));
    };

    add_bias_term(v, alpha.at(v, 0));

    const auto& paths = q.paths_into(v);
    for (std::size_t idx = 1; idx < paths.size(); ++idx) {
      const Path& p = paths[idx];
      const std::string& src = q.path_source(p);
      if (!q.is_source(src)) continue;
      const double a = alpha.at(v, idx);
      if (a == 0.0) continue;
      const Mat e_src = r.framing(src);
      if (e_src.cols() == 0) continue;
      GramTerm t;
      t.alpha = a;
      // cumulative products along the path for occurrence derivatives
      const std::size_t L = p.arrows.size();
      std::vector<Mat> prefix(L + 1);  // prefix[l] = w_{a_l} ... w_{a_1} (prefix[0] = I_{d_src})
      prefix[0] = Mat::identity(dims.dim(src));
      for (std::size_t l = 0; l < L; ++l) prefix[l + 1] = r.weight(p.arrows[l]) * prefix[l];
      std::vector<Mat> suffix(L + 1);  // suffix[l] = w_{a_L} ... w_{a_{l+1}} (suffix[L] = I_d)
      suffix[L] = Mat::identity(d);
      for (std::size_t l = L; l-- > 0;) suffix[l] = suffix[l + 1] * r.weight(p.arrows[l]);
      t.m = prefix[L] * e_src;

      for (std::size_t l = 0; l < L; ++l) {
        const std::string& aid = p.arrows[l];
        auto ita = wcoord.find(aid);
        if (ita == wcoord.end()) continue;
        const Mat right = (l == 0) ? e_src : prefix[l] * e_src;  // d_{t(a_l)} x n_src
        for (const auto& [rc, idxc] : ita->second) {
          // d/d(w_a)_{row,col} = suffix . E_{row,col} . right
          Mat dm(d, e_src.cols());
          // suffix[l+1] column `row` outer right row `col`
          for (std::size_t i = 0; i < d; ++i) {
            const cplx s = suffix[l + 1](i, rc.first);
            if (s == cplx(0.0)) continue;
            for (std::size_t j = 0; j < e_src.cols(); ++j) dm(i, j) += s * right(rc.second, j);
          }
          auto [it2, fresh] = t.deriv.emplace(idxc, dm);
          if (!fresh) it2->second += dm;
        }
      }
      // dependence through the source bias block: e_src = (eps | b)
      auto itb = bcoord.find(src);
      if (itb != bcoord.end()) {
        const std::size_t dsrc = dims.dim(src);
        for (const auto& [rc, idxc] : itb->second) {
          Mat dm(d, e_src.cols());
          for (std::size_t i = 0; i < d; ++i) dm(i, dsrc + rc.second) = prefix[L](i, rc.first);
          auto [it2, fresh] = t.deriv.emplace(idxc, dm);
          if (!fresh) it2->second += dm;
        }
      }
      terms.push_back(std::move(t));
    }

    // assemble gram and invert
    Mat gm = gram(q, dims, r, v, alpha);
    auto chol = cholesky(gm);
    if (!chol.ok) throw NotSpaceLike(v, min_eigenvalue_hermitian(gm));
    const Mat H = cholesky_inverse(chol.L);

    // first term: sum_t alpha_t tr(H K_mu K_nu^H) over coordinates of the same term
    for (const auto& t : terms) {
      for (const auto& [mu, kmu] : t.deriv) {
        const Mat hk = H * kmu;
        for (const auto& [nu, knu] : t.deriv) {
          G(mu, nu) += t.alpha * fdot(knu, hk);
        }
      }
    }
    // second term: tr(H B_nu^H H B_mu) with B_mu = sum_t alpha_t K_mu M_t^H
    std::map<std::size_t, Mat> B;
    for (const auto& t : terms) {
      for (const auto& [mu, kmu] : t.deriv) {
        Mat add(d, d);
        gemm_nc_acc(add, t.alpha, kmu, t.m);
        auto [it2, fresh] = B.emplace(mu, add);
        if (!fresh) it2->second += add;
      }
    }
    for (const auto& [mu, bmu] : B) {
      const Mat hbh = H * bmu * H;
      for (const auto& [nu, bnu] : B) {
        G(mu, nu) -= fdot(bnu, hbh);
      }
    }
  }
  return hermitize(G);
}

std::pair<FramedRep, GaugeElement> gauge_fix(const Quiver& q, const DimData& dims,
                                             const FramedRep& r) {
  validate_shapes(q, dims, r);
  GaugeElement g;
  for (const auto& v : q.vertices()) {
    const std::size_t d = dims.dim(v);
    if (dims.framing(v) < d)
      throw RankDeficientFraming("gauge_fix needs n_i >= d_i at vertex '" + v + "'");
    const Mat eps = col_block(r.framing(v), 0, d);
    try {
      g.g[v] = lu_inverse(eps);
    } catch (const SingularMatrix&) {
      throw RankDeficientFraming("leading framing block at '" + v + "' is singular");
    }
  }
  return {act(q, g, r), g};
}

}  // namespace qnr
