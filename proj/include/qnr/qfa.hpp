#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qnr/algebra.hpp"
#include "qnr/matrix.hpp"
#include "qnr/rng.hpp"

namespace qnr {

// Quantum finite automaton: unit initial state, accept subset, one unitary per
// alphabet symbol.
struct Qfa {
  std::size_t dim = 0;
  Mat q0;                         // dim x 1, unit norm
  std::vector<std::size_t> accept;  // 0-based basis indices
  std::vector<std::string> alphabet;
  std::map<std::string, Mat> unitaries;

  void validate() const;  // norms, unitarity, accept-set sanity
};

using Word = std::vector<std::string>;

// U_w = U_{w1} U_{w2} ... U_{wn}; empty word gives the identity.
Mat word_operator(const Qfa& m, const Word& w);

// || <q0| U_w P ||^2 restricted to the accept coordinates.
double acceptance_probability(const Qfa& m, const Word& w);

// Born-rule sample: index j with probability |<v/||v||, eps_j>|^2.
std::size_t measure(const Mat& v, Rng& rng);

// Machine for running program trees: state space with metric h, isometric
// framing e, and one generator per symbol (not necessarily h-unitary once
// built by hand; machine_from_qfa produces the h-unitary case).
struct QuantumMachine {
  std::size_t dim = 0;  // dim H_V
  Mat h;                // Hermitian metric on H_V
  std::size_t n = 0;    // dim H_F
  Mat e;                // dim x n isometric embedding: e^H h e = I
  std::vector<std::string> alphabet;
  std::map<std::string, Mat> generators;

  void validate() const;
};

// The machine whose one-measurement programs reproduce the automaton: h = I,
// e = I, and adjoint generators (the automaton acts on row vectors, programs
// on columns, so words keep their order and each symbol maps to U^H).
QuantumMachine machine_from_qfa(const Qfa& m);

// Gauge action on machines: e -> g e, h -> g^{-H} h g^{-1}, U -> g U g^{-1}.
QuantumMachine act_machine(const Mat& g, const QuantumMachine& m);

// Hatted evaluation over the machine: sum_k c_k e^H h (gen_{a_m} ... gen_{a_1}) e.
Mat machine_hatted(const HattedElement& hel, const QuantumMachine& m);

struct OutcomeDistribution {
  std::map<std::vector<std::size_t>, double> p;

  double total() const;
  double total_variation(const OutcomeDistribution& other) const;
  // Marginal of the outcome at one measurement position.
  std::map<std::size_t, double> marginal(std::size_t position) const;
};

// Full joint distribution over measurement outcomes of a program tree whose
// activation nodes are all measurements. Branch count is exponential in the
// number of measurement nodes; more than 12 such nodes is an error.
OutcomeDistribution exact_distribution(const AlgorithmTree& t, const QuantumMachine& m,
                                       const Mat& input);

// Monte Carlo counterpart: N runs with Born sampling, empirical frequencies.
OutcomeDistribution sample_program(const AlgorithmTree& t, const QuantumMachine& m,
                                   const Mat& input, std::uint64_t seed, std::size_t n_samples);

// Haar-style unitary: orthonormalized complex Gaussian with the R diagonal
// made real-positive. Deterministic per seed.
Mat random_unitary(std::size_t dim, std::uint64_t seed);

// Program tree for "apply the word, then measure once"; pairs with
// machine_from_qfa for the Definition-consistency check.
AlgorithmTree one_measurement_program(const Word& w);

}  // namespace qnr
