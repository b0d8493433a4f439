#pragma once

#include <cstdint>
#include <vector>

#include "qnr/algebra.hpp"
#include "qnr/metrics.hpp"

namespace qnr {

struct Sample {
  Inputs inputs;
  Mat target;  // n_out x 1
};

using Dataset = std::vector<Sample>;

struct TrainConfig {
  double lr = 0.1;
  std::size_t epochs = 100;
  std::size_t batch_size = 0;  // 0 = full batch
  double ridge = -1.0;         // < 0 selects 1e-8 tr(G)/dim; ignored for the flat metric
  std::uint64_t seed = 0;
  std::size_t refix_period = 1;  // gauge re-fix every k steps (0 = never)
  bool backtrack = false;        // halve until the batch cost does not increase
  bool learn_alpha = false;      // finite-difference alpha updates, clamped to [-1, 1]
};

struct TraceRow {
  std::size_t epoch = 0;
  std::size_t step = 0;
  double cost = 0.0;       // full-dataset cost after the step
  double grad_norm = 0.0;  // chart gradient norm for the step's batch
  double step_norm = 0.0;
  double min_gram_eig = 0.0;
  std::vector<double> alpha_snapshot;  // flattened by vertex order (learned mode only)
};

struct TrainTrace {
  std::vector<TraceRow> rows;
};

struct StepDiag {
  double cost_before = 0.0, cost_after = 0.0;
  double grad_norm = 0.0, step_norm = 0.0;
  double min_gram_eig = 0.0;
  std::size_t halvings = 0;
};

double cost(const AlgorithmTree& t, const Quiver& q, const DimData& dims, const FramedRep& r,
            const AlphaWeights& alpha, const Dataset& ds);

// Mean squared error gradient: accumulated backprop with seed 2(out-target)/B.
GradientRecord euclidean_gradient(const AlgorithmTree& t, const Quiver& q, const DimData& dims,
                                  const FramedRep& r, const AlphaWeights& alpha, const Dataset& ds);

// One preconditioned step on the chart coordinates: solves (G + lambda I) delta
// = -grad with G the moduli metric (identity for the all-zero alpha), then
// walks into the space-like locus by step halving. Expects a gauge-fixed r.
std::pair<FramedRep, StepDiag> riemannian_step(const AlgorithmTree& t, const Quiver& q,
                                               const DimData& dims, const FramedRep& r,
                                               const AlphaWeights& alpha, const Dataset& ds,
                                               const TrainConfig& cfg);

struct TrainResult {
  FramedRep rep;
  AlphaWeights alpha;
  TrainTrace trace;
};

TrainResult train(const AlgorithmTree& t, const Quiver& q, const DimData& dims,
                  const FramedRep& r0, const AlphaWeights& alpha0, const Dataset& ds,
                  const TrainConfig& cfg);

}  // namespace qnr
