#include "qnr/qfa.hpp"

#include <algorithm>
#include <cmath>

#include "qnr/linalg.hpp"

namespace qnr {

namespace {

double unitarity_defect(const Mat& u) {
  return frobenius(matmul_nc(adjoint(u), adjoint(u)) - Mat::identity(u.rows()));
}

}  // namespace

void Qfa::validate() const {
  if (dim == 0) throw Error("qfa: dimension must be positive");
  if (q0.rows() != dim || q0.cols() != 1) throw ShapeMismatch("qfa: q0 has wrong shape");
  if (std::abs(norm2(q0) - 1.0) > 1e-12) throw Error("qfa: q0 is not a unit vector");
  if (accept.empty()) throw Error("qfa: accept set is empty");
  for (auto j : accept)
    if (j >= dim) throw Error("qfa: accept index out of range");
  for (const auto& s : alphabet) {
    auto it = unitaries.find(s);
    if (it == unitaries.end()) throw UnknownSymbol(s);
    const Mat& u = it->second;
    if (u.rows() != dim || u.cols() != dim)
      throw ShapeMismatch("qfa: unitary for '" + s + "' has wrong shape");
    if (unitarity_defect(u) > 1e-10) throw Error("qfa: operator for '" + s + "' is not unitary");
  }
}

Mat word_operator(const Qfa& m, const Word& w) {
  Mat u = Mat::identity(m.dim);
  for (const auto& s : w) {
    auto it = m.unitaries.find(s);
    if (it == m.unitaries.end() ||
        std::find(m.alphabet.begin(), m.alphabet.end(), s) == m.alphabet.end())
      throw UnknownSymbol(s);
    u = u * it->second;
  }
  return u;
}

double acceptance_probability(const Qfa& m, const Word& w) {
  const Mat u = word_operator(m, w);
  const Mat row = adjoint(m.q0) * u;  // 1 x dim
  double p = 0.0;
  for (auto j : m.accept) p += std::norm(row(0, j));
  return p;
}

std::size_t measure(const Mat& v, Rng& rng) {
  if (v.cols() != 1) throw ShapeMismatch("measure: expected a column vector");
  const double nsq = norm2(v) * norm2(v);
  if (nsq <= 0.0) throw ZeroVector("measure: zero state");
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t j = 0; j < v.rows(); ++j) {
    acc += std::norm(v(j, 0)) / nsq;
    if (u < acc) return j;
  }
  return v.rows() - 1;  // guard against rounding at the top end
}

void QuantumMachine::validate() const {
  if (dim == 0 || n == 0) throw Error("machine: dimensions must be positive");
  if (h.rows() != dim || h.cols() != dim || !is_hermitian(h, 1e-10))
    throw Error("machine: h is not a Hermitian dim x dim matrix");
  if (e.rows() != dim || e.cols() != n) throw ShapeMismatch("machine: framing shape");
  const Mat iso = adjoint(e) * h * e;
  if (frobenius(iso - Mat::identity(n)) > 1e-10)
    throw Error("machine: framing is not isometric for h");
  for (const auto& s : alphabet) {
    auto it = generators.find(s);
    if (it == generators.end()) throw UnknownSymbol(s);
    const Mat& u = it->second;
    if (u.rows() != dim || u.cols() != dim)
      throw ShapeMismatch("machine: generator for '" + s + "' has wrong shape");
    if (frobenius(adjoint(u) * h * u - h) > 1e-10)
      throw Error("machine: generator for '" + s + "' is not h-unitary");
  }
}

QuantumMachine machine_from_qfa(const Qfa& m) {
  m.validate();
  QuantumMachine qm;
  qm.dim = m.dim;
  qm.n = m.dim;
  qm.h = Mat::identity(m.dim);
  qm.e = Mat::identity(m.dim);
  qm.alphabet = m.alphabet;
  for (const auto& [s, u] : m.unitaries) qm.generators[s] = adjoint(u);
  return qm;
}

QuantumMachine act_machine(const Mat& g, const QuantumMachine& m) {
  Mat gi;
  try {
    gi = lu_inverse(g);
  } catch (const SingularMatrix&) {
    throw SingularGauge("machine gauge element is numerically singular");
  }
  QuantumMachine out = m;
  out.e = g * m.e;
  out.h = adjoint(gi) * m.h * gi;
  for (auto& [s, u] : out.generators) u = g * u * gi;
  return out;
}

Mat machine_hatted(const HattedElement& hel, const QuantumMachine& m) {
  Mat acc(m.dim, m.dim);
  for (const auto& t : hel.terms) {
    Mat prod = Mat::identity(m.dim);
    for (const auto& s : t.path.arrows) {
      auto it = m.generators.find(s);
      if (it == m.generators.end()) throw UnknownSymbol(s);
      prod = it->second * prod;
    }
    acc += t.coef * prod;
  }
  return adjoint(m.e) * m.h * acc * m.e;
}

double OutcomeDistribution::total() const {
  double s = 0.0;
  for (const auto& [k, v] : p) s += v;
  return s;
}

double OutcomeDistribution::total_variation(const OutcomeDistribution& other) const {
  double s = 0.0;
  for (const auto& [k, v] : p) {
    auto it = other.p.find(k);
    s += std::abs(v - (it == other.p.end() ? 0.0 : it->second));
  }
  for (const auto& [k, v] : other.p)
    if (!p.count(k)) s += v;
  return 0.5 * s;
}

std::map<std::size_t, double> OutcomeDistribution::marginal(std::size_t position) const {
  std::map<std::size_t, double> out;
  for (const auto& [k, v] : p) {
    if (position >= k.size()) throw Error("marginal: position beyond outcome length");
    out[k[position]] += v;
  }
  return out;
}

namespace {

std::size_t count_measurements(const Expr& e) {
  std::size_t n = 0;
  for (const auto& t : e.terms) {
    if (std::holds_alternative<ActArg>(t.arg)) {
      const auto& act = std::get<ActArg>(t.arg);
      if (!ActivationSpec::get(act.sigma).is_measurement)
        throw NonMeasurementActivation("program trees admit only measurement activations; found '" +
                                       act.sigma + "'");
      n += 1 + count_measurements(*act.expr);
    }
  }
  return n;
}

struct Branch {
  Mat value;
  double prob;
  std::vector<std::size_t> outcomes;
};

// Joint enumeration; outcome order is evaluation order (inner measurements
// first, sibling terms left to right).
std::vector<Branch> distribute_expr(const Expr& e, const QuantumMachine& m, const Mat& input);

std::vector<Branch> distribute_term(const Term& t, const QuantumMachine& m, const Mat& input) {
  std::vector<Branch> arg_branches;
  if (std::holds_alternative<InputArg>(t.arg)) {
    arg_branches.push_back({input, 1.0, {}});
  } else {
    const auto& act = std::get<ActArg>(t.arg);
    for (const auto& b : distribute_expr(*act.expr, m, input)) {
      const double nsq = norm2(b.value) * norm2(b.value);
      if (nsq <= 0.0) throw ZeroVector("measurement of a zero state");
      for (std::size_t j = 0; j < b.value.rows(); ++j) {
        const double pj = std::norm(b.value(j, 0)) / nsq;
        if (pj <= 0.0) continue;
        Branch nb;
        nb.value = Mat(b.value.rows(), 1);
        nb.value(j, 0) = 1.0;  // collapse to the basis vector
        nb.prob = b.prob * pj;
        nb.outcomes = b.outcomes;
        nb.outcomes.push_back(j);
        arg_branches.push_back(std::move(nb));
      }
    }
  }
  const Mat c = machine_hatted(t.coef, m);
  for (auto& b : arg_branches) b.value = c * b.value;
  return arg_branches;
}

std::vector<Branch> distribute_expr(const Expr& e, const QuantumMachine& m, const Mat& input) {
  std::vector<Branch> acc;
  bool first = true;
  for (const auto& t : e.terms) {
    auto tb = distribute_term(t, m, input);
    if (first) {
      acc = std::move(tb);
      first = false;
      continue;
    }
    std::vector<Branch> merged;
    merged.reserve(acc.size() * tb.size());
    for (const auto& a : acc) {
      for (const auto& b : tb) {
        Branch nb;
        nb.value = a.value + b.value;
        nb.prob = a.prob * b.prob;
        nb.outcomes = a.outcomes;
        nb.outcomes.insert(nb.outcomes.end(), b.outcomes.begin(), b.outcomes.end());
        merged.push_back(std::move(nb));
      }
    }
    acc = std::move(merged);
  }
  return acc;
}

}  // namespace

OutcomeDistribution exact_distribution(const AlgorithmTree& t, const QuantumMachine& m,
                                       const Mat& input) {
  m.validate();
  if (input.rows() != m.n || input.cols() != 1)
    throw ShapeMismatch("program input has wrong shape");
  const std::size_t nm = count_measurements(t.root);
  if (nm > 12)
    throw MeasurementBudgetExceeded("exact distribution over " + std::to_string(nm) +
                                    " measurement nodes; limit is 12");
  OutcomeDistribution out;
  for (const auto& b : distribute_expr(t.root, m, input)) out.p[b.outcomes] += b.prob;
  return out;
}

namespace {

// Hatted matrices are fixed across samples; cache them per Term.
using HattedCache = std::map<const Term*, Mat>;

const Mat& cached_hatted(const Term& t, const QuantumMachine& m, HattedCache& cache) {
  auto it = cache.find(&t);
  if (it == cache.end()) it = cache.emplace(&t, machine_hatted(t.coef, m)).first;
  return it->second;
}

Mat sample_expr(const Expr& e, const QuantumMachine& m, const Mat& input, Rng& rng,
                std::vector<std::size_t>& outcomes, HattedCache& cache) {
  Mat value;
  bool first = true;
  for (const auto& t : e.terms) {
    Mat u;
    if (std::holds_alternative<InputArg>(t.arg)) {
      u = input;
    } else {
      const auto& act = std::get<ActArg>(t.arg);
      if (!ActivationSpec::get(act.sigma).is_measurement)
        throw NonMeasurementActivation("program trees admit only measurement activations");
      const Mat v = sample_expr(*act.expr, m, input, rng, outcomes, cache);
      const std::size_t j = measure(v, rng);
      outcomes.push_back(j);
      u = Mat(v.rows(), 1);
      u(j, 0) = 1.0;
    }
    const Mat term_value = cached_hatted(t, m, cache) * u;
    if (first) {
      value = term_value;
      first = false;
    } else {
      value += term_value;
    }
  }
  return value;
}

}  // namespace

OutcomeDistribution sample_program(const AlgorithmTree& t, const QuantumMachine& m,
                                   const Mat& input, std::uint64_t seed, std::size_t n_samples) {
  m.validate();
  if (input.rows() != m.n || input.cols() != 1)
    throw ShapeMismatch("program input has wrong shape");
  count_measurements(t.root);  // validates activation kinds
  OutcomeDistribution out;
  const Rng master(seed);
  const double w = 1.0 / static_cast<double>(n_samples);
  HattedCache cache;
  for (std::size_t i = 0; i < n_samples; ++i) {
    Rng rng = master.split(i);
    std::vector<std::size_t> outcomes;
    (void)sample_expr(t.root, m, input, rng, outcomes, cache);
    out.p[outcomes] += w;
  }
  return out;
}

Mat random_unitary(std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  Mat a(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) a(i, j) = rng.cgaussian();
  return mgs_orthonormalize(a).q;
}

AlgorithmTree one_measurement_program(const Word& w) {
  // measure( word-hat . input ), with an identity coefficient above the node
  HattedElement word_hat;
  word_hat.source = "";
  word_hat.target = "";
  word_hat.terms.push_back({cplx(1.0), Path{"", w}});
  Expr inner;
  inner.target = "";
  inner.terms.push_back({word_hat, InputArg{""}});

  HattedElement id_hat;
  id_hat.source = "";
  id_hat.target = "";
  id_hat.terms.push_back({cplx(1.0), Path{"", {}}});

  AlgorithmTree t;
  t.root.target = "";
  t.root.terms.push_back({id_hat, ActArg{"measure", std::make_shared<const Expr>(inner)}});
  return t;
}

}  // namespace qnr
