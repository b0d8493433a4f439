#pragma once

#include <map>
#include <string>
#include <vector>

#include "qnr/linalg.hpp"
#include "qnr/quiver.hpp"

namespace qnr {

// Per-path weights of the alpha-family. One value per enumerated path into
// each vertex (index 0 = trivial path, whose weight applies to the bias block
// b_i only; the epsilon block is never weighted).
struct AlphaWeights {
  std::map<std::string, std::vector<double>> values;

  static AlphaWeights moduli(const Quiver& q);      // all 1
  static AlphaWeights euclidean(const Quiver& q);   // all 0
  static AlphaWeights hyperbolic(const Quiver& q);  // all -1
  static AlphaWeights constant(const Quiver& q, double value);

  double at(const std::string& vertex, std::size_t path_index) const;
  void check_keys(const Quiver& q) const;  // throws if not aligned with the path sets
  bool all_zero() const;
};

// The inside-the-inverse Gram at one vertex:
//   eps eps^H + alpha_e b b^H + sum over nontrivial source-rooted paths of
//   alpha_gamma (w_gamma e^{(t(gamma))}) (w_gamma e^{(t(gamma))})^H.
Mat gram(const Quiver& q, const DimData& dims, const FramedRep& r, const std::string& vertex,
         const AlphaWeights& alpha);

struct VertexMetric {
  Mat gram;      // Hermitian
  Mat H;         // gram^{-1}, the bundle metric
  Mat chol;      // lower Cholesky factor of gram
  double logdet; // log det gram
};

struct MetricState {
  std::map<std::string, VertexMetric> vertex;
  AlphaWeights alpha;
  std::uint64_t rep_fingerprint = 0;  // bit-level hash of the rep it was computed at

  const VertexMetric& at(const std::string& v) const;
};

std::uint64_t rep_fingerprint(const FramedRep& r);

// Inverts every Gram by Cholesky; throws NotSpaceLike (vertex id + smallest
// eigenvalue) at the first failure.
MetricState metric_state(const Quiver& q, const DimData& dims, const FramedRep& r,
                         const AlphaWeights& alpha);

bool is_space_like(const Quiver& q, const DimData& dims, const FramedRep& r,
                   const AlphaWeights& alpha);

double min_gram_eigenvalue(const MetricState& m);

// Free coordinates of the gauge-fixed chart: every weight entry plus the bias
// block entries of each framing (the leading square block is frozen).
struct ChartCoord {
  enum class Kind { weight, bias };
  Kind kind;
  std::string id;        // arrow id or vertex id
  std::size_t row, col;  // col is relative to the bias block for Kind::bias
};

struct ChartCoords {
  std::vector<ChartCoord> coords;

  static ChartCoords standard(const Quiver& q, const DimData& dims);
  std::size_t size() const { return coords.size(); }
  std::vector<cplx> flatten(const Quiver& q, const DimData& dims, const FramedRep& r) const;
  FramedRep unflatten(const Quiver& q, const DimData& dims, const FramedRep& base,
                      const std::vector<cplx>& values) const;
};

// Mixed Wirtinger Hessian of sum_i log det gram_i over the chart coordinates,
// computed analytically through Jacobi's formula. Hermitian; PSD at the
// all-ones weights on space-like points.
Mat kahler_gram(const Quiver& q, const DimData& dims, const FramedRep& r,
                const AlphaWeights& alpha, const ChartCoords& chart);

// Canonical chart representative: g_i = eps_i^{-1}, making every leading
// framing block the identity. Requires n_i >= d_i and invertible blocks.
std::pair<FramedRep, GaugeElement> gauge_fix(const Quiver& q, const DimData& dims,
                                             const FramedRep& r);

}  // namespace qnr
