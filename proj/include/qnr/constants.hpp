#pragma once

namespace qnr {

// Numeric contract of the library, echoed into every result record.
struct Tolerances {
  double hermitian = 1e-12;
  double metric_inverse = 1e-10;
  double gauge_invariance = 1e-8;
  double backprop_fd_rel = 1e-6;
  double kahler_fd_rel = 1e-4;
  double qfa_consistency = 1e-10;
  double euclidean_match = 1e-10;
  double space_like_margin = 1e-6;
  double distribution_sum = 1e-10;
  double xor_target_cost = 0.05;
};

inline const Tolerances& tolerances() {
  static const Tolerances t{};
  return t;
}

}  // namespace qnr
