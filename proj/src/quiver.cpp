#include "qnr/quiver.hpp"

#include <algorithm>
#include <deque>

#include "qnr/linalg.hpp"
#include "qnr/rng.hpp"

namespace qnr {

std::string Path::key() const {
  std::string k = target + ":";
  for (std::size_t i = 0; i < arrows.size(); ++i) {
    if (i) k += ".";
    k += arrows[i];
  }
  return k;
}

std::vector<std::string> validate_quiver(const std::vector<std::string>& vertices,
                                         const std::vector<Arrow>& arrows) {
  std::map<std::string, std::size_t> vidx;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (!vidx.emplace(vertices[i], i).second)
      throw Error("duplicate vertex id '" + vertices[i] + "'");
  }
  std::map<std::string, bool> aseen;
  for (const auto& a : arrows) {
    if (!aseen.emplace(a.id, true).second) throw Error("duplicate arrow id '" + a.id + "'");
    if (!vidx.count(a.tail)) throw DanglingArrow(a.id, a.tail);
    if (!vidx.count(a.head)) throw DanglingArrow(a.id, a.head);
  }
  // Kahn's algorithm over declaration order.
  std::map<std::string, std::size_t> indeg;
  for (const auto& v : vertices) indeg[v] = 0;
  for (const auto& a : arrows) ++indeg[a.head];
  std::deque<std::string> ready;
  for (const auto& v : vertices)
    if (indeg[v] == 0) ready.push_back(v);
  std::vector<std::string> order;
  order.reserve(vertices.size());
  std::map<std::string, std::size_t> remaining = indeg;
  while (!ready.empty()) {
    const std::string v = ready.front();
    ready.pop_front();
    order.push_back(v);
    for (const auto& a : arrows)
      if (a.tail == v && --remaining[a.head] == 0) ready.push_back(a.head);
  }
  if (order.size() != vertices.size()) {
    // Name a cycle: walk backwards through un-ordered vertices until repeat.
    std::map<std::string, bool> in_order;
    for (const auto& v : order) in_order[v] = true;
    std::string cur;
    for (const auto& v : vertices)
      if (!in_order.count(v)) {
        cur = v;
        break;
      }
    std::vector<std::string> walk;
    std::map<std::string, std::size_t> pos;
    while (!pos.count(cur)) {
      pos[cur] = walk.size();
      walk.push_back(cur);
      for (const auto& a : arrows)
        if (a.head == cur && !in_order.count(a.tail)) {
          cur = a.tail;
          break;
        }
    }
    std::vector<std::string> cycle(walk.begin() + pos[cur], walk.end());
    std::reverse(cycle.begin(), cycle.end());
    throw OrientedCycle(cycle);
  }
  return order;
}

Quiver::Quiver(std::vector<std::string> vertices, std::vector<Arrow> arrows)
    : vertices_(std::move(vertices)), arrows_(std::move(arrows)) {
  topo_ = validate_quiver(vertices_, arrows_);
  for (std::size_t i = 0; i < vertices_.size(); ++i) vindex_[vertices_[i]] = i;
  for (std::size_t i = 0; i < arrows_.size(); ++i) aindex_[arrows_[i].id] = i;

  // Eager path enumeration along the topological order. Acyclicity keeps the
  // sets finite; desk scale keeps them small.
  for (const auto& v : topo_) {
    std::vector<Path> ps;
    ps.push_back(Path{v, {}});
    for (const auto& a : arrows_) {
      if (a.head != v) continue;
      for (const auto& base : paths_.at(a.tail)) {
        Path p = base;
        p.target = v;
        p.arrows.push_back(a.id);
        ps.push_back(std::move(p));
      }
    }
    std::sort(ps.begin(), ps.end(), [](const Path& x, const Path& y) {
      if (x.arrows.size() != y.arrows.size()) return x.arrows.size() < y.arrows.size();
      return x.arrows < y.arrows;
    });
    paths_[v] = std::move(ps);
  }
}

const Arrow& Quiver::arrow(const std::string& id) const {
  auto it = aindex_.find(id);
  if (it == aindex_.end()) throw UnknownSymbol(id);
  return arrows_[it->second];
}

bool Quiver::is_source(const std::string& vertex) const {
  for (const auto& a : arrows_)
    if (a.head == vertex) return false;
  return true;
}

const std::vector<Path>& Quiver::paths_into(const std::string& vertex) const {
  auto it = paths_.find(vertex);
  if (it == paths_.end()) throw UnknownSymbol(vertex);
  return it->second;
}

const std::string& Quiver::path_source(const Path& p) const {
  if (p.trivial()) return p.target;
  return arrow(p.arrows.front()).tail;
}

const std::vector<Path>& enumerate_paths(const Quiver& q, const std::string& vertex) {
  return q.paths_into(vertex);
}

std::size_t DimData::dim(const std::string& v) const {
  auto it = d.find(v);
  if (it == d.end()) throw UnknownSymbol(v);
  return it->second;
}

std::size_t DimData::framing(const std::string& v) const {
  auto it = n.find(v);
  if (it == n.end()) throw UnknownSymbol(v);
  return it->second;
}

void DimData::validate(const Quiver& q) const {
  for (const auto& v : q.vertices()) {
    if (dim(v) < 1) throw Error("representation dimension at '" + v + "' must be >= 1");
    framing(v);  // presence check; n may be 0
  }
}

const Mat& FramedRep::weight(const std::string& arrow_id) const {
  auto it = weights.find(arrow_id);
  if (it == weights.end()) throw UnknownSymbol(arrow_id);
  return it->second;
}

const Mat& FramedRep::framing(const std::string& vertex_id) const {
  auto it = framings.find(vertex_id);
  if (it == framings.end()) throw UnknownSymbol(vertex_id);
  return it->second;
}

void validate_shapes(const Quiver& q, const DimData& dims, const FramedRep& r) {
  dims.validate(q);
  for (const auto& a : q.arrows()) {
    const Mat& w = r.weight(a.id);
    if (w.rows() != dims.dim(a.head) || w.cols() != dims.dim(a.tail))
      throw ShapeMismatch("weight '" + a.id + "' has wrong shape");
  }
  for (const auto& v : q.vertices()) {
    const Mat& e = r.framing(v);
    if (e.rows() != dims.dim(v) || e.cols() != dims.framing(v))
      throw ShapeMismatch("framing at '" + v + "' has wrong shape");
  }
}

Mat eval_path(const Quiver& q, const FramedRep& r, const Path& p) {
  Mat acc = r.framing(q.path_source(p));
  for (const auto& aid : p.arrows) acc = r.weight(aid) * acc;
  return acc;
}

FramedRep act(const Quiver& q, const GaugeElement& g, const FramedRep& r) {
  FramedRep out;
  out.field = r.field;
  std::map<std::string, Mat> ginv;
  for (const auto& [v, gv] : g.g) {
    if (gv.rows() != gv.cols()) throw ShapeMismatch("gauge element at '" + v + "' not square");
    try {
      ginv[v] = lu_inverse(gv);
    } catch (const SingularMatrix&) {
      throw SingularGauge("gauge element at '" + v + "' is numerically singular");
    }
    if (r.field == Field::real && max_imag(gv) != 0.0)
      throw FieldMismatch("complex gauge element applied to a real representation");
  }
  auto gv_at = [&](const std::string& v) -> const Mat& {
    auto it = g.g.find(v);
    if (it == g.g.end()) throw UnknownSymbol(v);
    return it->second;
  };
  for (const auto& a : q.arrows()) out.weights[a.id] = gv_at(a.head) * r.weight(a.id) * ginv.at(a.tail);
  for (const auto& v : q.vertices()) out.framings[v] = gv_at(v) * r.framing(v);
  return out;
}

GaugeElement gauge_compose(const GaugeElement& a, const GaugeElement& b) {
  GaugeElement out;
  for (const auto& [v, av] : a.g) out.g[v] = av * b.g.at(v);
  return out;
}

GaugeElement gauge_inverse(const Quiver& q, const GaugeElement& g) {
  GaugeElement out;
  for (const auto& v : q.vertices()) {
    try {
      out.g[v] = lu_inverse(g.g.at(v));
    } catch (const SingularMatrix&) {
      throw SingularGauge("gauge element at '" + v + "' is numerically singular");
    }
  }
  return out;
}

namespace {
Mat random_mat(std::size_t rows, std::size_t cols, Rng& rng, double scale, Field field) {
  Mat m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      m(i, j) = (field == Field::real) ? cplx(scale * rng.gaussian())
                                       : cplx(scale) * rng.cgaussian();
  return m;
}
}  // namespace

FramedRep random_rep(const Quiver& q, const DimData& dims, std::uint64_t seed, double scale,
                     Field field) {
  if (scale < 0.0) throw Error("random_rep: scale must be >= 0");
  dims.validate(q);
  Rng rng(seed);
  FramedRep r;
  r.field = field;
  for (const auto& a : q.arrows())
    r.weights[a.id] = random_mat(dims.dim(a.head), dims.dim(a.tail), rng, scale, field);
  for (const auto& v : q.vertices())
    r.framings[v] = random_mat(dims.dim(v), dims.framing(v), rng, scale, field);
  return r;
}

FramedRep random_chart_rep(const Quiver& q, const DimData& dims, std::uint64_t seed, double scale,
                           Field field) {
  if (scale < 0.0) throw Error("random_chart_rep: scale must be >= 0");
  dims.validate(q);
  Rng rng(seed);
  FramedRep r;
  r.field = field;
  for (const auto& a : q.arrows())
    r.weights[a.id] = random_mat(dims.dim(a.head), dims.dim(a.tail), rng, scale, field);
  for (const auto& v : q.vertices()) {
    const std::size_t d = dims.dim(v), n = dims.framing(v);
    if (n < d) throw RankDeficientFraming("chart init needs n_i >= d_i at vertex '" + v + "'");
    Mat e(d, n);
    for (std::size_t i = 0; i < d; ++i) e(i, i) = 1.0;
    const Mat bias = random_mat(d, n - d, rng, scale, field);
    set_col_block(e, d, bias);
    r.framings[v] = std::move(e);
  }
  return r;
}

GaugeElement random_gauge(const Quiver& q, const DimData& dims, std::uint64_t seed, double spread,
                          Field field) {
  // identity + spread * gaussian keeps condition numbers tame
  Rng rng(seed);
  GaugeElement g;
  for (const auto& v : q.vertices()) {
    const std::size_t d = dims.dim(v);
    Mat m = Mat::identity(d);
    Mat noise = random_mat(d, d, rng, spread, field);
    g.g[v] = m + noise;
  }
  return g;
}

}  // namespace qnr
