#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "qnr/metrics.hpp"
#include "qnr/quiver.hpp"

namespace qnr {

// Pointwise scalar activation (or a measurement marker for program trees).
struct ActivationSpec {
  std::string id;
  bool is_measurement = false;
  bool real_only = false;
  std::function<cplx(cplx)> f, df;

  // Registry of built-ins: identity, relu, tanh, sigmoid, measure.
  static const ActivationSpec& get(const std::string& id);
  static bool known(const std::string& id);
};

// Formal combination of paths sharing source s and target t; evaluates to
// e_t^H H_t (sum_k c_k w_{gamma_k}) e_s, an n_t x n_s matrix.
struct HattedTerm {
  cplx coef;
  Path path;
  bool operator==(const HattedTerm&) const = default;
};

struct HattedElement {
  std::string source, target;
  std::vector<HattedTerm> terms;
  bool operator==(const HattedElement&) const = default;
};

struct Expr;

struct InputArg {
  std::string slot;
};

struct ActArg {
  std::string sigma;
  std::shared_ptr<const Expr> expr;
};

using Arg = std::variant<InputArg, ActArg>;

struct Term {
  HattedElement coef;
  Arg arg;
};

struct Expr {
  std::string target;  // framing vertex carrying the value of this sum
  std::vector<Term> terms;
};

struct AlgorithmTree {
  Expr root;
};

bool tree_equal(const Expr& a, const Expr& b);
inline bool tree_equal(const AlgorithmTree& a, const AlgorithmTree& b) {
  return tree_equal(a.root, b.root);
}

// Near-ring operations on trees. Addition concatenates root sums (targets must
// match); composition substitutes `inner` for every INPUT(slot) leaf of
// `outer`, inserting an identity node so coefficient chains stay explicit.
AlgorithmTree tree_add(const AlgorithmTree& a, const AlgorithmTree& b);
AlgorithmTree tree_compose(const AlgorithmTree& outer, const std::string& slot,
                           const AlgorithmTree& inner);

void type_check(const AlgorithmTree& t, const Quiver& q, const DimData& dims);

using Inputs = std::map<std::string, Mat>;  // slot vertex -> n_slot x 1 vector

Mat hatted_eval(const HattedElement& h, const Quiver& q, const DimData& dims, const FramedRep& r,
                const MetricState& m);

Mat forward(const AlgorithmTree& t, const Quiver& q, const DimData& dims, const FramedRep& r,
            const MetricState& m, const Inputs& inputs);

// ---- degree-1 form-valued trees ----------------------------------------
// d(sum_k coef_k . arg_k) is recorded edge-by-edge: each edge is labeled by
// d(coef_k) and carries the 0-form leaf (the argument's value) plus, when the
// argument is an activation, a first-order D-node over the differentiated
// argument. Purely symbolic; independent of any representation.

struct FormExpr;

struct ValueLeaf {};

struct DNode {
  std::string sigma;
  std::shared_ptr<const FormExpr> inner;
};

using FormChild = std::variant<ValueLeaf, DNode>;

struct FormEdge {
  HattedElement dcoef;
  std::vector<FormChild> children;
};

struct FormExpr {
  std::vector<FormEdge> edges;
};

struct FormTree {
  FormExpr root;
};

FormTree differentiate(const AlgorithmTree& t);
bool form_equal(const FormExpr& a, const FormExpr& b);
inline bool form_equal(const FormTree& a, const FormTree& b) { return form_equal(a.root, b.root); }
std::size_t form_dnode_count(const FormExpr& e);

// ---- gradients -----------------------------------------------------------

// Partial derivatives of <seed, output> with respect to every entry of the
// representation. Real mode: d_* hold plain d/dx. Complex mode: d_* hold
// dJ/dz (Wirtinger) and dbar_* hold dJ/dzbar; J real makes them conjugate.
struct GradientRecord {
  Field field = Field::real;
  std::map<std::string, Mat> d_weights, d_framings;
  std::map<std::string, Mat> dbar_weights, dbar_framings;

  GradientRecord& accumulate(const GradientRecord& other, double w = 1.0);
  double norm() const;
};

GradientRecord zero_gradient(const Quiver& q, const DimData& dims, Field field);

// Reverse traversal of differentiate(t): pairs the seed covector with the
// degree-1 form evaluated at r, metric dependence included.
GradientRecord backprop(const AlgorithmTree& t, const Quiver& q, const DimData& dims,
                        const FramedRep& r, const MetricState& m, const Inputs& inputs,
                        const Mat& seed_covector);

// Shared machinery for running one tree over many samples at a fixed
// representation; hatted matrices are computed once.
class TreeEvaluator {
 public:
  TreeEvaluator(const AlgorithmTree& t, const Quiver& q, const DimData& dims, const FramedRep& r,
                const MetricState& m);

  Mat forward(const Inputs& inputs) const;
  GradientRecord backprop(const Inputs& inputs, const Mat& seed_covector) const;
  std::size_t output_dim() const { return out_dim_; }

  struct Node;  // cached per-Term hatted pieces (implementation detail)

 private:
  const AlgorithmTree& tree_;
  const Quiver& q_;
  const DimData& dims_;
  const FramedRep& r_;
  const MetricState& m_;
  std::shared_ptr<const Node> root_;
  FormTree form_;
  std::size_t out_dim_ = 0;
};

// Convenience builder for layered trees (used by tests and bundled configs):
// out_coef_k . sigma( sum_j in_coef_jk . x_j ) summed over hidden vertices.
AlgorithmTree make_layered_tree(const Quiver& q, const std::vector<std::string>& input_vertices,
                                const std::vector<std::string>& hidden_vertices,
                                const std::string& output_vertex, const std::string& sigma);

}  // namespace qnr
