// Acceptance suite: runs every numbered criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exit code = number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "qnr/cli.hpp"
#include "qnr/constants.hpp"
#include "qnr/learn.hpp"
#include "qnr/qfa.hpp"
#include "support/oracles.hpp"

using namespace qnr;

namespace {

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<bool(std::string&)> body;
};

HattedElement unit_hat(const std::string& src, const std::string& tgt,
                       const std::vector<std::string>& arrows) {
  HattedElement h;
  h.source = src;
  h.target = tgt;
  h.terms.push_back({cplx(1.0), Path{tgt, arrows}});
  return h;
}

AlgorithmTree linear_tree() {
  AlgorithmTree t;
  t.root.target = "v";
  t.root.terms.push_back({unit_hat("u", "v", {"a"}), InputArg{"u"}});
  return t;
}

double pairing(const AlgorithmTree& t, const Quiver& q, const DimData& dims, const FramedRep& r,
               const AlphaWeights& alpha, const Inputs& in, const Mat& seed) {
  const MetricState m = metric_state(q, dims, r, alpha);
  return fdot(seed, forward(t, q, dims, r, m, in)).real();
}

// ---- criterion 1: closed-form bundle metric on the one-hidden-layer chart --

bool c1_metric_reproduction(std::string& detail) {
  const Quiver fig = oracle::layered_quiver(2);
  const DimData df = oracle::unit_dims(fig);
  const AlphaWeights moduli = AlphaWeights::moduli(fig);
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const FramedRep r = gauge_fix(fig, df, random_rep(fig, df, 1000 + seed, 1.0, Field::real)).first;
    const MetricState m = metric_state(fig, df, r, moduli);
    const double x1sq = std::norm(r.weight("a11")(0, 0)) + std::norm(r.weight("a21")(0, 0));
    const double x2sq = std::norm(r.weight("a12")(0, 0)) + std::norm(r.weight("a22")(0, 0));
    worst = std::max(worst, std::abs(m.at("h1").H(0, 0) - cplx(1.0 / (1.0 + x1sq))));
    worst = std::max(worst, std::abs(m.at("h2").H(0, 0) - cplx(1.0 / (1.0 + x2sq))));
    const double go = 1.0 + std::norm(r.weight("b1")(0, 0)) * x1sq +
                      std::norm(r.weight("b2")(0, 0)) * x2sq;
    worst = std::max(worst, std::abs(m.at("out").H(0, 0) - cplx(1.0 / go)));
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf), "max abs deviation %.3e (tol 1e-12), 100 points", worst);
  detail = buf;
  return worst < 1e-12;
}

// ---- criterion 2: gauge invariance of forward, cost, distributions ---------

bool c2_gauge_invariance(std::string& detail) {
  const double tol = tolerances().gauge_invariance;
  double worst = 0.0;
  std::size_t trials = 0;

  struct Setup {
    Quiver q;
    DimData dims;
    AlgorithmTree tree;
  };
  std::vector<Setup> setups;
  {
    const Quiver fig = oracle::layered_quiver(2);
    DimData d;
    for (const auto& v : fig.vertices()) {
      d.d[v] = 1;
      d.n[v] = 1;
    }
    setups.push_back({fig, d, make_layered_tree(fig, {"in1", "in2"}, {"h1", "h2"}, "out", "tanh")});
  }
  {
    const Quiver fig = oracle::layered_quiver(3);
    DimData d;
    for (const auto& v : fig.vertices()) {
      d.d[v] = 2;
      d.n[v] = 2;
    }
    setups.push_back(
        {fig, d, make_layered_tree(fig, {"in1", "in2"}, {"h1", "h2", "h3"}, "out", "tanh")});
  }
  {
    const Quiver deep = oracle::deep_quiver();
    DimData d;
    for (const auto& v : deep.vertices()) {
      d.d[v] = 1;
      d.n[v] = 2;
    }
    setups.push_back({deep, d, oracle::deep_tree(deep, "tanh")});
  }

  Rng rng(2024);
  for (const auto& s : setups) {
    const std::vector<AlphaWeights> presets = {
        AlphaWeights::moduli(s.q), AlphaWeights::euclidean(s.q), AlphaWeights::hyperbolic(s.q)};
    for (std::uint64_t i = 0; i < 34; ++i) {
      const FramedRep r = random_rep(s.q, s.dims, 9000 + i, 0.35, Field::real);
      const GaugeElement g = random_gauge(s.q, s.dims, 9500 + i, 0.25, Field::real);
      const FramedRep rg = act(s.q, g, r);
      Inputs in;
      Dataset ds;
      Sample sample;
      for (const auto& v : s.q.vertices()) {
        if (!s.q.is_source(v)) continue;
        Mat x(s.dims.framing(v), 1);
        for (std::size_t k = 0; k < x.rows(); ++k) x(k, 0) = rng.gaussian();
        in[v] = x;
        sample.inputs[v] = x;
      }
      sample.target = Mat(s.dims.framing(s.tree.root.target), 1);
      for (std::size_t k = 0; k < sample.target.rows(); ++k) sample.target(k, 0) = rng.gaussian();
      ds.push_back(sample);
      for (const auto& alpha : presets) {
        MetricState m1, m2;
        try {
          m1 = metric_state(s.q, s.dims, r, alpha);
          m2 = metric_state(s.q, s.dims, rg, alpha);
        } catch (const NotSpaceLike&) {
          continue;  // hyperbolic preset off the locus; invariance holds over the locus
        }
        const Mat f1 = forward(s.tree, s.q, s.dims, r, m1, in);
        const Mat f2 = forward(s.tree, s.q, s.dims, rg, m2, in);
        worst = std::max(worst, max_abs_diff(f1, f2));
        worst = std::max(worst,
                         std::abs(cost(s.tree, s.q, s.dims, r, alpha, ds) -
                                  cost(s.tree, s.q, s.dims, rg, alpha, ds)));
        ++trials;
      }
    }
  }

  // program distributions under the machine action
  for (std::uint64_t i = 0; i < 100; ++i) {
    const std::size_t dim = 2 + i % 4;
    Qfa m;
    m.dim = dim;
    Rng r2(5000 + i);
    Mat q0(dim, 1);
    for (std::size_t k = 0; k < dim; ++k) q0(k, 0) = r2.cgaussian();
    m.q0 = cplx(1.0 / norm2(q0)) * q0;
    m.accept = {0};
    m.alphabet = {"a", "b"};
    m.unitaries["a"] = random_unitary(dim, 600 + i);
    m.unitaries["b"] = random_unitary(dim, 700 + i);
    const QuantumMachine machine = machine_from_qfa(m);
    Mat g = Mat::identity(dim);
    for (std::size_t k = 0; k < g.size(); ++k) g.data()[k] += 0.3 * r2.cgaussian();
    const QuantumMachine moved = act_machine(g, machine);
    const AlgorithmTree prog = one_measurement_program({"a", "b"});
    const OutcomeDistribution d1 = exact_distribution(prog, machine, m.q0);
    const OutcomeDistribution d2 = exact_distribution(prog, moved, m.q0);
    for (const auto& [k, v] : d1.p) {
      const double other = d2.p.count(k) ? d2.p.at(k) : 0.0;
      worst = std::max(worst, std::abs(v - other));
    }
    ++trials;
  }

  char buf[160];
  std::snprintf(buf, sizeof(buf), "max deviation %.3e over %zu checks (tol %g)", worst, trials,
                tol);
  detail = buf;
  return worst < tol;
}

// ---- criterion 3: backprop against central finite differences --------------

bool c3_backprop(std::string& detail) {
  const double tol = tolerances().backprop_fd_rel;
  double worst_rel = 0.0;
  std::size_t points = 0;

  struct Case {
    Quiver q;
    DimData dims;
    AlgorithmTree tree;
    std::string sigma;
  };
  std::vector<Case> cases;
  {
    const Quiver one = oracle::one_arrow_quiver();
    cases.push_back({one, oracle::unit_dims(one), linear_tree(), "linear"});
  }
  {
    const Quiver fig = oracle::layered_quiver(2);
    cases.push_back({fig, oracle::unit_dims(fig),
                     make_layered_tree(fig, {"in1", "in2"}, {"h1", "h2"}, "out", "relu"), "relu"});
  }
  {
    const Quiver deep = oracle::deep_quiver();
    cases.push_back({deep, oracle::unit_dims(deep), oracle::deep_tree(deep, "tanh"), "tanh"});
  }

  Rng rng(31337);
  for (const auto& c : cases) {
    for (const auto& alpha : {AlphaWeights::euclidean(c.q), AlphaWeights::moduli(c.q)}) {
      std::size_t accepted = 0;
      std::uint64_t seed = 0;
      while (accepted < 20 && seed < 200) {
        ++seed;
        const FramedRep r = random_chart_rep(c.q, c.dims, 3000 + seed, 0.8, Field::real);
        Inputs in;
        for (const auto& v : c.q.vertices()) {
          if (!c.q.is_source(v)) continue;
          Mat x(c.dims.framing(v), 1);
          for (std::size_t k = 0; k < x.rows(); ++k) x(k, 0) = rng.gaussian();
          in[v] = x;
        }
        Mat seedvec(c.dims.framing(c.tree.root.target), 1);
        for (std::size_t k = 0; k < seedvec.rows(); ++k) seedvec(k, 0) = rng.gaussian();

        // keep relu pre-activations away from the kink so the FD oracle is valid
        if (c.sigma == "relu") {
          const MetricState m = metric_state(c.q, c.dims, r, alpha);
          bool near_kink = false;
          for (const std::string h : {"h1", "h2"}) {
            const std::string a1 = (h == "h1") ? "a11" : "a12";
            const std::string a2 = (h == "h1") ? "a21" : "a22";
            const cplx pre =
                hatted_eval(unit_hat("in1", h, {a1}), c.q, c.dims, r, m)(0, 0) * in.at("in1")(0, 0) +
                hatted_eval(unit_hat("in2", h, {a2}), c.q, c.dims, r, m)(0, 0) * in.at("in2")(0, 0);
            if (std::abs(pre.real()) < 0.05) near_kink = true;
          }
          if (near_kink) continue;
        }
        ++accepted;
        ++points;

        const MetricState m = metric_state(c.q, c.dims, r, alpha);
        const GradientRecord g = backprop(c.tree, c.q, c.dims, r, m, in, seedvec);
        for (const auto& e : oracle::all_entries(c.q, c.dims, false)) {
          const double fd = oracle::central_diff(
              [&](const FramedRep& rr) { return pairing(c.tree, c.q, c.dims, rr, alpha, in, seedvec); },
              r, e, 1e-5);
          const Mat& gm = e.is_weight ? g.d_weights.at(e.id) : g.d_framings.at(e.id);
          const double an = gm(e.row, e.col).real();
          worst_rel = std::max(worst_rel, std::abs(an - fd) / std::max(1.0, std::abs(fd)));
        }
      }
      if (accepted < 20) {
        detail = "could not assemble 20 kink-free points";
        return false;
      }
    }
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf), "max relative error %.3e over %zu points (tol %g)", worst_rel,
                points, tol);
  detail = buf;
  return worst_rel < tol;
}

// ---- criterion 4: moduli metric against the finite-difference Hessian ------

bool c4_kahler(std::string& detail) {
  const double tol = tolerances().kahler_fd_rel;
  double worst = 0.0;

  // scalar closed form first
  const Quiver one = oracle::one_arrow_quiver();
  const DimData d1 = oracle::unit_dims(one);
  const ChartCoords chart1 = ChartCoords::standard(one, d1);
  const AlphaWeights m1 = AlphaWeights::moduli(one);
  for (std::uint64_t i = 0; i < 50; ++i) {
    Rng rng(400 + i);
    const cplx x(rng.gaussian(), rng.gaussian());
    FramedRep r;
    r.field = Field::complex_;
    r.weights["a"] = Mat(1, 1, {x});
    r.framings["u"] = Mat::identity(1);
    r.framings["v"] = Mat::identity(1);
    const Mat G = kahler_gram(one, d1, r, m1, chart1);
    const double want = 1.0 / std::pow(1.0 + std::norm(x), 2);
    if (std::abs(G(0, 0) - cplx(want)) > 1e-8) {
      detail = "scalar closed form missed";
      return false;
    }
  }

  struct Case {
    Quiver q;
    DimData dims;
  };
  std::vector<Case> cases;
  cases.push_back({one, d1});
  {
    const Quiver fig = oracle::layered_quiver(2);
    cases.push_back({fig, oracle::unit_dims(fig)});
  }

  for (const auto& c : cases) {
    const ChartCoords chart = ChartCoords::standard(c.q, c.dims);
    const AlphaWeights moduli = AlphaWeights::moduli(c.q);
    for (std::uint64_t i = 0; i < 20; ++i) {
      const FramedRep base =
          gauge_fix(c.q, c.dims, random_rep(c.q, c.dims, 8800 + i, 0.8, Field::complex_)).first;
      const std::vector<cplx> z0 = chart.flatten(c.q, c.dims, base);
      const Mat analytic = kahler_gram(c.q, c.dims, base, moduli, chart);
      const Mat fd = oracle::fd_wirtinger_hessian(
          [&](const std::vector<cplx>& z) {
            const FramedRep r = chart.unflatten(c.q, c.dims, base, z);
            double s = 0.0;
            for (const auto& v : c.q.vertices()) {
              auto res = cholesky(gram(c.q, c.dims, r, v, moduli));
              if (!res.ok) throw NotSpaceLike(v, 0.0);
              s += cholesky_logdet(res.L);
            }
            return s;
          },
          z0, 1e-4);
      worst = std::max(worst, max_abs_diff(analytic, fd) / std::max(1e-8, max_abs(fd)));
    }
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf), "max relative deviation %.3e (tol %g)", worst, tol);
  detail = buf;
  return worst < tol;
}

// ---- criterion 5: hyperbolic space-like boundary ----------------------------

bool c5_hyperbolic_locus(std::string& detail) {
  const Quiver one = oracle::one_arrow_quiver();
  const DimData d1 = oracle::unit_dims(one);
  const AlphaWeights hyp = AlphaWeights::hyperbolic(one);
  const double margin = tolerances().space_like_margin;
  std::size_t checked = 0, wrong = 0;
  for (int i = 0; i < 1000; ++i) {
    const double x = -2.0 + 4.0 * (i + 0.5) / 1000.0;
    if (std::abs(std::abs(x) - 1.0) <= margin) continue;
    FramedRep r;
    r.field = Field::real;
    r.weights["a"] = Mat(1, 1, {cplx(x)});
    r.framings["u"] = Mat::identity(1);
    r.framings["v"] = Mat::identity(1);
    const bool want = std::abs(x) < 1.0;
    if (is_space_like(one, d1, r, hyp) != want) ++wrong;
    ++checked;
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%zu grid points, %zu misclassified", checked, wrong);
  detail = buf;
  return wrong == 0;
}

// ---- criterion 6: automaton/program consistency + Monte Carlo ---------------

bool c6_qfa(std::string& detail) {
  const double tol = tolerances().qfa_consistency;
  double worst = 0.0;
  Rng rng(112);
  double worst_sigma = 0.0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const std::size_t dim = 2 + i % 5;
    Qfa m;
    m.dim = dim;
    Rng r2(2200 + i);
    Mat q0(dim, 1);
    for (std::size_t k = 0; k < dim; ++k) q0(k, 0) = r2.cgaussian();
    m.q0 = cplx(1.0 / norm2(q0)) * q0;
    const std::size_t na = 1 + r2.below(dim);
    for (std::size_t j = 0; j < na; ++j) m.accept.push_back(j);
    m.alphabet = {"a", "b"};
    m.unitaries["a"] = random_unitary(dim, 3300 + i);
    m.unitaries["b"] = random_unitary(dim, 4400 + i);

    Word w;
    const std::size_t len = rng.below(9);
    for (std::size_t k = 0; k < len; ++k) w.push_back(m.alphabet[rng.below(2)]);

    const QuantumMachine machine = machine_from_qfa(m);
    const AlgorithmTree prog = one_measurement_program(w);
    const OutcomeDistribution exact = exact_distribution(prog, machine, m.q0);
    double accept_mass = 0.0;
    for (auto j : m.accept) {
      const std::vector<std::size_t> key{j};
      if (exact.p.count(key)) accept_mass += exact.p.at(key);
    }
    worst = std::max(worst, std::abs(accept_mass - acceptance_probability(m, w)));

    // Monte Carlo agreement on every tenth automaton
    if (i % 10 == 0) {
      const std::size_t N = 100000;
      const OutcomeDistribution emp = sample_program(prog, machine, m.q0, 777 + i, N);
      for (const auto& [seq, p] : exact.p) {
        const double phat = emp.p.count(seq) ? emp.p.at(seq) : 0.0;
        const double sigma = std::sqrt(std::max(p * (1.0 - p), 1e-12) / N);
        worst_sigma = std::max(worst_sigma, std::abs(phat - p) / sigma);
      }
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "max |accept - marginal| %.3e (tol %g); MC max %.2f sigma (limit 3)", worst, tol,
                worst_sigma);
  detail = buf;
  return worst < tol && worst_sigma < 3.0;
}

// ---- criterion 7: flat preset reduces to plain gradient descent -------------

bool c7_euclidean_reduction(std::string& detail) {
  const double tol = tolerances().euclidean_match;
  const Quiver fig = oracle::layered_quiver(2);
  const DimData df = oracle::unit_dims(fig);
  const AlgorithmTree t = make_layered_tree(fig, {"in1", "in2"}, {"h1", "h2"}, "out", "tanh");
  const AlphaWeights flat = AlphaWeights::euclidean(fig);
  auto mk = [](double a, double b, double y) {
    Sample s;
    s.inputs["in1"] = Mat(1, 1, {cplx(a)});
    s.inputs["in2"] = Mat(1, 1, {cplx(b)});
    s.target = Mat(1, 1, {cplx(y)});
    return s;
  };
  const Dataset ds = {mk(0, 0, 0), mk(0, 1, 1), mk(1, 0, 1), mk(1, 1, 0)};
  const ChartCoords chart = ChartCoords::standard(fig, df);

  TrainConfig cfg;
  cfg.lr = 0.05;
  cfg.epochs = 100;
  cfg.seed = 12;
  const FramedRep r0 = gauge_fix(fig, df, random_rep(fig, df, 12, 0.5, Field::real)).first;

  // library trajectory
  const TrainResult res = train(t, fig, df, r0, flat, ds, cfg);

  // reference: plain full-batch gradient descent over the chart coordinates
  FramedRep ref = r0;
  for (int step = 0; step < 100; ++step) {
    const GradientRecord g = euclidean_gradient(t, fig, df, ref, flat, ds);
    for (const auto& c : chart.coords) {
      Mat& dst =
          (c.kind == ChartCoord::Kind::weight) ? ref.weights.at(c.id) : ref.framings.at(c.id);
      const Mat& gm =
          (c.kind == ChartCoord::Kind::weight) ? g.d_weights.at(c.id) : g.d_framings.at(c.id);
      const std::size_t col = (c.kind == ChartCoord::Kind::bias) ? df.dim(c.id) + c.col : c.col;
      dst(c.row, col) -= cfg.lr * gm(c.row, col).real();
    }
  }
  double worst = 0.0;
  for (const auto& a : fig.arrows())
    worst = std::max(worst, max_abs_diff(res.rep.weight(a.id), ref.weight(a.id)));
  for (const auto& v : fig.vertices())
    worst = std::max(worst, max_abs_diff(res.rep.framing(v), ref.framing(v)));
  char buf[128];
  std::snprintf(buf, sizeof(buf), "max trajectory deviation %.3e after 100 steps (tol %g)", worst,
                tol);
  detail = buf;
  return worst < tol;
}

// ---- criterion 8: end-to-end learning -----------------------------------------

bool c8_xor(std::string& detail) {
  const double target = tolerances().xor_target_cost;
  const Quiver fig = oracle::layered_quiver(2);
  const DimData df = oracle::unit_dims(fig);
  const AlgorithmTree t = make_layered_tree(fig, {"in1", "in2"}, {"h1", "h2"}, "out", "relu");
  auto mk = [](double a, double b, double y) {
    Sample s;
    s.inputs["in1"] = Mat(1, 1, {cplx(a)});
    s.inputs["in2"] = Mat(1, 1, {cplx(b)});
    s.target = Mat(1, 1, {cplx(y)});
    return s;
  };
  const double lo = -5.0, hi = 5.0;  // boolean encoding of the bundled dataset
  const Dataset ds = {mk(lo, lo, 0), mk(lo, hi, 1), mk(hi, lo, 1), mk(hi, hi, 0)};

  int wins = 0;
  std::string costs;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    TrainConfig cfg;
    cfg.lr = 0.08;
    cfg.epochs = 5000;
    cfg.seed = seed;
    const FramedRep r0 = random_chart_rep(fig, df, seed, 0.10, Field::real);
    double final_cost = 1e9;
    try {
      const TrainResult res = train(t, fig, df, r0, AlphaWeights::moduli(fig), ds, cfg);
      final_cost = res.trace.rows.back().cost;
    } catch (const Error&) {
    }
    if (final_cost < target) ++wins;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f ", final_cost);
    costs += buf;
  }
  detail = "final costs: " + costs + "-> " + std::to_string(wins) + "/10 under " +
           std::to_string(target);
  return wins >= 7;
}

// ---- criterion 9: near-ring laws ------------------------------------------------

bool c9_near_ring(std::string& detail) {
  const Quiver one = oracle::one_arrow_quiver();
  const DimData d1 = oracle::unit_dims(one);
  const AlphaWeights flat = AlphaWeights::euclidean(one);
  double worst = 0.0;
  Rng rng(64);

  AlgorithmTree z = linear_tree();
  auto scalar_tree = [&](cplx c) {
    AlgorithmTree t;
    t.root.target = "v";
    HattedElement h = unit_hat("v", "v", {});
    h.terms[0].coef = c;
    t.root.terms.push_back({h, InputArg{"v"}});
    return t;
  };
  for (int trial = 0; trial < 100; ++trial) {
    const FramedRep r = random_rep(one, d1, 100 + trial, 0.8, Field::real);
    const MetricState m = metric_state(one, d1, r, flat);
    const AlgorithmTree x = scalar_tree(cplx(rng.gaussian()));
    const AlgorithmTree y = scalar_tree(cplx(rng.gaussian()));
    Inputs in{{"u", Mat(1, 1, {cplx(rng.gaussian())})}};
    const Mat lhs = forward(tree_compose(tree_add(x, y), "v", z), one, d1, r, m, in);
    const Mat rhs = forward(tree_compose(x, "v", z), one, d1, r, m, in) +
                    forward(tree_compose(y, "v", z), one, d1, r, m, in);
    worst = std::max(worst, max_abs_diff(lhs, rhs));
  }

  // left-distributivity witness: relu o (id + (-id)) vs relu o id + relu o (-id)
  AlgorithmTree relu_z;
  relu_z.root.target = "v";
  {
    Expr inner;
    inner.target = "v";
    inner.terms.push_back({unit_hat("v", "v", {}), InputArg{"v"}});
    relu_z.root.terms.push_back(
        {unit_hat("v", "v", {}), ActArg{"relu", std::make_shared<const Expr>(inner)}});
  }
  FramedRep rid;
  rid.field = Field::real;
  rid.weights["a"] = Mat::identity(1);
  rid.framings["u"] = Mat::identity(1);
  rid.framings["v"] = Mat::identity(1);
  const MetricState mid = metric_state(one, d1, rid, flat);
  Inputs in1{{"v", Mat(1, 1, {cplx(1.0)})}};
  const AlgorithmTree x = scalar_tree(cplx(1.0));
  const AlgorithmTree y = scalar_tree(cplx(-1.0));
  const double lhs =
      forward(tree_compose(relu_z, "v", tree_add(x, y)), one, d1, rid, mid, in1)(0, 0).real();
  const double rhs = forward(tree_compose(relu_z, "v", x), one, d1, rid, mid, in1)(0, 0).real() +
                     forward(tree_compose(relu_z, "v", y), one, d1, rid, mid, in1)(0, 0).real();
  const double gap = std::abs(lhs - rhs);

  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "right-distributivity max deviation %.3e (tol 1e-10); left gap %.3f at v=1 "
                "(needs > 0.1)",
                worst, gap);
  detail = buf;
  return worst < 1e-10 && gap > 0.1;
}

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {1, "closed-form bundle metric on the layered chart", 1.0, c1_metric_reproduction},
      {2, "gauge invariance of forward/cost/distributions", 30.0, c2_gauge_invariance},
      {3, "backprop vs central finite differences", 30.0, c3_backprop},
      {4, "moduli metric vs finite-difference Hessian", 30.0, c4_kahler},
      {5, "hyperbolic space-like boundary", 1.0, c5_hyperbolic_locus},
      {6, "automaton & program consistency + Monte Carlo", 60.0, c6_qfa},
      {7, "flat-preset reduction to plain gradient descent", 10.0, c7_euclidean_reduction},
      {8, "end-to-end learning on the scaled XOR task", 120.0, c8_xor},
      {9, "near-ring distributivity laws", 10.0, c9_near_ring},
  };

  int failures = 0;
  for (auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = c.body(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_budget = secs <= c.budget_s;
    if (!in_budget) detail += " [over budget]";
    const bool pass = ok && in_budget;
    std::printf("criterion %d: %s — %s — %s (%.2f s, budget %.0f s)\n", c.id,
                pass ? "PASS" : "FAIL", c.name.c_str(), detail.c_str(), secs, c.budget_s);
    std::fflush(stdout);
    if (!pass) ++failures;
  }
  if (failures == 0)
    std::printf("acceptance: all %zu criteria passed\n", criteria.size());
  else
    std::printf("acceptance: %d criteria FAILED\n", failures);
  return failures;
}
