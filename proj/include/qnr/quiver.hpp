#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qnr/matrix.hpp"

namespace qnr {

struct Arrow {
  std::string id, tail, head;
};

// Validate raw vertex/arrow lists; returns a topological order or throws
// DanglingArrow / OrientedCycle (with the offending cycle named).
std::vector<std::string> validate_quiver(const std::vector<std::string>& vertices,
                                         const std::vector<Arrow>& arrows);

// A path into `target`: arrows listed in application order, so the matrix of
// the path is w_{a_m} ... w_{a_1}. Empty arrow list = trivial path at target.
struct Path {
  std::string target;
  std::vector<std::string> arrows;
  bool trivial() const { return arrows.empty(); }
  std::string key() const;
  bool operator==(const Path&) const = default;
};

// Acyclic directed multigraph with eagerly built path caches. Instances are
// immutable and always valid.
class Quiver {
 public:
  Quiver(std::vector<std::string> vertices, std::vector<Arrow> arrows);

  const std::vector<std::string>& vertices() const { return vertices_; }
  const std::vector<Arrow>& arrows() const { return arrows_; }
  const std::vector<std::string>& topo_order() const { return topo_; }

  bool has_vertex(const std::string& v) const { return vindex_.count(v) != 0; }
  const Arrow& arrow(const std::string& id) const;

  bool is_source(const std::string& vertex) const;  // in-degree 0

  // All paths ending at `vertex`, trivial path first, then by (length,
  // lexicographic arrow-id sequence).
  const std::vector<Path>& paths_into(const std::string& vertex) const;

  // Source vertex of a path (tail of its first arrow; target if trivial).
  const std::string& path_source(const Path& p) const;

 private:
  std::vector<std::string> vertices_;
  std::vector<Arrow> arrows_;
  std::vector<std::string> topo_;
  std::map<std::string, std::size_t> vindex_;
  std::map<std::string, std::size_t> aindex_;
  std::map<std::string, std::vector<Path>> paths_;
};

const std::vector<Path>& enumerate_paths(const Quiver& q, const std::string& vertex);

struct DimData {
  std::map<std::string, std::size_t> d;  // representation dimension, >= 1
  std::map<std::string, std::size_t> n;  // framing dimension, >= 0

  std::size_t dim(const std::string& v) const;
  std::size_t framing(const std::string& v) const;
  void validate(const Quiver& q) const;
};

enum class Field { real, complex_ };

struct FramedRep {
  Field field = Field::real;
  std::map<std::string, Mat> weights;   // arrow id -> d_head x d_tail
  std::map<std::string, Mat> framings;  // vertex id -> d_v x n_v

  const Mat& weight(const std::string& arrow_id) const;
  const Mat& framing(const std::string& vertex_id) const;
};

void validate_shapes(const Quiver& q, const DimData& dims, const FramedRep& r);

struct GaugeElement {
  std::map<std::string, Mat> g;  // vertex id -> invertible d_v x d_v
};

// w_{a_m} ... w_{a_1} e^{(source)}; the trivial path gives e^{(target)}.
Mat eval_path(const Quiver& q, const FramedRep& r, const Path& p);

// Gauge action: w_a -> g_{h(a)} w_a g_{t(a)}^{-1}, e^(i) -> g_i e^(i).
FramedRep act(const Quiver& q, const GaugeElement& g, const FramedRep& r);

GaugeElement gauge_compose(const GaugeElement& a, const GaugeElement& b);  // (a.b)_i = a_i b_i
GaugeElement gauge_inverse(const Quiver& q, const GaugeElement& g);

FramedRep random_rep(const Quiver& q, const DimData& dims, std::uint64_t seed, double scale,
                     Field field = Field::real);

// Random point of the gauge-fixed chart: Gaussian weights and bias blocks,
// leading framing blocks frozen to the identity. Requires n_i >= d_i.
FramedRep random_chart_rep(const Quiver& q, const DimData& dims, std::uint64_t seed, double scale,
                           Field field = Field::real);

GaugeElement random_gauge(const Quiver& q, const DimData& dims, std::uint64_t seed, double spread,
                          Field field = Field::real);

}  // namespace qnr
