#include "qnr/algebra.hpp"

#include <algorithm>
#include <cmath>

namespace qnr {

// ---- activations -----------------------------------------------------------

namespace {

std::map<std::string, ActivationSpec> make_registry() {
  std::map<std::string, ActivationSpec> reg;
  auto add = [&](ActivationSpec s) { reg[s.id] = std::move(s); };
  add({"identity", false, false, [](cplx z) { return z; }, [](cplx) { return cplx(1.0); }});
  add({"relu", false, true, [](cplx z) { return z.real() > 0.0 ? z : cplx(0.0); },
       [](cplx z) { return z.real() > 0.0 ? cplx(1.0) : cplx(0.0); }});
  add({"tanh", false, false, [](cplx z) { return std::tanh(z); },
       [](cplx z) {
         const cplx t = std::tanh(z);
         return cplx(1.0) - t * t;
       }});
  add({"sigmoid", false, false,
       [](cplx z) { return cplx(1.0) / (cplx(1.0) + std::exp(-z)); },
       [](cplx z) {
         const cplx s = cplx(1.0) / (cplx(1.0) + std::exp(-z));
         return s * (cplx(1.0) - s);
       }});
  ActivationSpec meas;
  meas.id = "measure";
  meas.is_measurement = true;
  meas.f = [](cplx) -> cplx {
    throw MeasurementInDeterministicContext("measurement evaluated outside a program context");
  };
  meas.df = meas.f;
  add(std::move(meas));
  return reg;
}

const std::map<std::string, ActivationSpec>& registry() {
  static const std::map<std::string, ActivationSpec> reg = make_registry();
  return reg;
}

}  // namespace

const ActivationSpec& ActivationSpec::get(const std::string& id) {
  auto it = registry().find(id);
  if (it == registry().end()) throw UnknownSymbol(id);
  return it->second;
}

bool ActivationSpec::known(const std::string& id) { return registry().count(id) != 0; }

// ---- tree structure ---------------------------------------------------------

bool tree_equal(const Expr& a, const Expr& b) {
  if (a.target != b.target || a.terms.size() != b.terms.size()) return false;
  for (std::size_t i = 0; i < a.terms.size(); ++i) {
    if (!(a.terms[i].coef == b.terms[i].coef)) return false;
    const Arg& x = a.terms[i].arg;
    const Arg& y = b.terms[i].arg;
    if (x.index() != y.index()) return false;
    if (std::holds_alternative<InputArg>(x)) {
      if (std::get<InputArg>(x).slot != std::get<InputArg>(y).slot) return false;
    } else {
      const auto& ax = std::get<ActArg>(x);
      const auto& ay = std::get<ActArg>(y);
      if (ax.sigma != ay.sigma || !tree_equal(*ax.expr, *ay.expr)) return false;
    }
  }
  return true;
}

AlgorithmTree tree_add(const AlgorithmTree& a, const AlgorithmTree& b) {
  if (a.root.target != b.root.target)
    throw TypeCheckFailure("tree_add: summands target different framings");
  AlgorithmTree out = a;
  out.root.terms.insert(out.root.terms.end(), b.root.terms.begin(), b.root.terms.end());
  return out;
}

namespace {

Expr compose_expr(const Expr& outer, const std::string& slot, const AlgorithmTree& inner) {
  Expr out;
  out.target = outer.target;
  for (const auto& term : outer.terms) {
    Term t = term;
    if (std::holds_alternative<InputArg>(term.arg)) {
      if (std::get<InputArg>(term.arg).slot == slot) {
        t.arg = ActArg{"identity", std::make_shared<const Expr>(inner.root)};
      }
    } else {
      const auto& act = std::get<ActArg>(term.arg);
      t.arg = ActArg{act.sigma,
                     std::make_shared<const Expr>(compose_expr(*act.expr, slot, inner))};
    }
    out.terms.push_back(std::move(t));
  }
  return out;
}

}  // namespace

AlgorithmTree tree_compose(const AlgorithmTree& outer, const std::string& slot,
                           const AlgorithmTree& inner) {
  if (inner.root.target != slot)
    throw TypeCheckFailure("tree_compose: inner tree does not produce framing '" + slot + "'");
  return AlgorithmTree{compose_expr(outer.root, slot, inner)};
}

// ---- type checking ----------------------------------------------------------

namespace {

void check_hatted(const HattedElement& h, const Quiver& q) {
  if (!q.has_vertex(h.source) || !q.has_vertex(h.target))
    throw TypeCheckFailure("hatted element references unknown vertex");
  if (h.terms.empty()) throw TypeCheckFailure("hatted element with no terms");
  for (const auto& t : h.terms) {
    const Path& p = t.path;
    if (p.target != h.target) throw TypeCheckFailure("path target differs from hatted target");
    std::string at = h.source;
    for (const auto& aid : p.arrows) {
      const Arrow& a = q.arrow(aid);
      if (a.tail != at) throw TypeCheckFailure("path arrows do not compose");
      at = a.head;
    }
    if (at != h.target) throw TypeCheckFailure("path does not end at the hatted target");
  }
}

void check_expr(const Expr& e, const Quiver& q, const DimData& dims) {
  if (e.terms.empty()) throw TypeCheckFailure("empty sum");
  for (const auto& term : e.terms) {
    check_hatted(term.coef, q);
    if (term.coef.target != e.target)
      throw TypeCheckFailure("term target differs from sum target");
    if (std::holds_alternative<InputArg>(term.arg)) {
      const auto& in = std::get<InputArg>(term.arg);
      if (!q.has_vertex(in.slot)) throw TypeCheckFailure("unknown input slot '" + in.slot + "'");
      if (term.coef.source != in.slot)
        throw TypeCheckFailure("coefficient source does not match its input slot");
    } else {
      const auto& act = std::get<ActArg>(term.arg);
      if (!ActivationSpec::known(act.sigma))
        throw TypeCheckFailure("unknown activation '" + act.sigma + "'");
      if (term.coef.source != act.expr->target)
        throw TypeCheckFailure("coefficient source does not match activation framing");
      check_expr(*act.expr, q, dims);
    }
  }
}

}  // namespace

void type_check(const AlgorithmTree& t, const Quiver& q, const DimData& dims) {
  check_expr(t.root, q, dims);
}

// ---- hatted evaluation -------------------------------------------------------

namespace {

// sum_k c_k w_{gamma_k} as a d_t x d_s matrix of raw weights.
Mat hatted_weight_sum(const HattedElement& h, const Quiver& q, const DimData& dims,
                      const FramedRep& r) {
  const std::size_t dt = dims.dim(h.target), ds = dims.dim(h.source);
  Mat w(dt, ds);
  for (const auto& t : h.terms) {
    if (t.path.trivial()) {
      if (dt != ds) throw ShapeMismatch("trivial path in hatted element with source != target");
      for (std::size_t i = 0; i < dt; ++i) w(i, i) += t.coef;
      continue;
    }
    Mat prod = r.weight(t.path.arrows.front());
    for (std::size_t l = 1; l < t.path.arrows.size(); ++l)
      prod = r.weight(t.path.arrows[l]) * prod;
    w += t.coef * prod;
  }
  return w;
}

}  // namespace

Mat hatted_eval(const HattedElement& h, const Quiver& q, const DimData& dims, const FramedRep& r,
                const MetricState& m) {
  check_hatted(h, q);
  const Mat& et = r.framing(h.target);
  const Mat& es = r.framing(h.source);
  const Mat& H = m.at(h.target).H;
  const Mat w = hatted_weight_sum(h, q, dims, r);
  return adjoint(et) * H * w * es;
}

// ---- evaluator with caches ---------------------------------------------------

struct TreeEvaluator::Node {
  const Expr* expr;
  struct TermCache {
    const Term* term;
    Mat P1;   // e_t^H H_t           (n_t x d_t)
    Mat W;    // sum c_k w_gamma     (d_t x d_s)
    Mat C;    // P1 W e_s            (n_t x n_s)
    std::shared_ptr<const Node> child;  // null for inputs
  };
  std::vector<TermCache> terms;
};

namespace {

std::shared_ptr<const TreeEvaluator::Node> build_node(const Expr& e, const Quiver& q,
                                                      const DimData& dims, const FramedRep& r,
                                                      const MetricState& m) {
  auto node = std::make_shared<TreeEvaluator::Node>();
  node->expr = &e;
  for (const auto& term : e.terms) {
    TreeEvaluator::Node::TermCache tc;
    tc.term = &term;
    const Mat& et = r.framing(term.coef.target);
    tc.P1 = adjoint(et) * m.at(term.coef.target).H;
    tc.W = hatted_weight_sum(term.coef, q, dims, r);
    tc.C = tc.P1 * tc.W * r.framing(term.coef.source);
    if (std::holds_alternative<ActArg>(term.arg))
      tc.child = build_node(*std::get<ActArg>(term.arg).expr, q, dims, r, m);
    node->terms.push_back(std::move(tc));
  }
  return node;
}

Mat apply_pointwise(const ActivationSpec& act, const Mat& x, bool derivative, Field field) {
  if (act.is_measurement)
    throw MeasurementInDeterministicContext(
        "measurement node in deterministic forward/backprop");
  if (act.real_only && field == Field::complex_)
    throw TypeCheckFailure("activation '" + act.id + "' requires real mode");
  Mat y = x;
  for (std::size_t i = 0; i < y.size(); ++i)
    y.data()[i] = derivative ? act.df(x.data()[i]) : act.f(x.data()[i]);
  return y;
}

}  // namespace

TreeEvaluator::TreeEvaluator(const AlgorithmTree& t, const Quiver& q, const DimData& dims,
                             const FramedRep& r, const MetricState& m)
    : tree_(t), q_(q), dims_(dims), r_(r), m_(m) {
  type_check(t, q, dims);
  if (m.rep_fingerprint != rep_fingerprint(r))
    throw MetricUnavailable("metric state was computed for a different representation");
  root_ = build_node(t.root, q, dims, r, m);
  form_ = qnr::differentiate(t);
  out_dim_ = dims.framing(t.root.target);
}

namespace {

Mat eval_node(const TreeEvaluator::Node& node, const Inputs& inputs, const DimData& dims,
              Field field, std::map<const TreeEvaluator::Node*, Mat>* pre_acts) {
  Mat value(dims.framing(node.expr->target), 1);
  for (const auto& tc : node.terms) {
    Mat u;
    if (tc.child) {
      const auto& act = std::get<ActArg>(tc.term->arg);
      Mat x = eval_node(*tc.child, inputs, dims, field, pre_acts);
      if (pre_acts) (*pre_acts)[tc.child.get()] = x;
      u = apply_pointwise(ActivationSpec::get(act.sigma), x, false, field);
    } else {
      const auto& in = std::get<InputArg>(tc.term->arg);
      auto it = inputs.find(in.slot);
      if (it == inputs.end()) throw TypeCheckFailure("missing input for slot '" + in.slot + "'");
      if (it->second.rows() != dims.framing(in.slot) || it->second.cols() != 1)
        throw ShapeMismatch("input vector for slot '" + in.slot + "' has wrong shape");
      u = it->second;
    }
    value += tc.C * u;
  }
  return value;
}

}  // namespace

Mat TreeEvaluator::forward(const Inputs& inputs) const {
  return eval_node(*root_, inputs, dims_, r_.field, nullptr);
}

// ---- symbolic differentiation -------------------------------------------------

namespace {

FormExpr differentiate_expr(const Expr& e) {
  FormExpr out;
  for (const auto& term : e.terms) {
    FormEdge edge;
    edge.dcoef = term.coef;
    edge.children.push_back(ValueLeaf{});
    if (std::holds_alternative<ActArg>(term.arg)) {
      const auto& act = std::get<ActArg>(term.arg);
      edge.children.push_back(
          DNode{act.sigma, std::make_shared<const FormExpr>(differentiate_expr(*act.expr))});
    }
    out.edges.push_back(std::move(edge));
  }
  return out;
}

}  // namespace

FormTree differentiate(const AlgorithmTree& t) { return FormTree{differentiate_expr(t.root)}; }

bool form_equal(const FormExpr& a, const FormExpr& b) {
  if (a.edges.size() != b.edges.size()) return false;
  for (std::size_t i = 0; i < a.edges.size(); ++i) {
    if (!(a.edges[i].dcoef == b.edges[i].dcoef)) return false;
    if (a.edges[i].children.size() != b.edges[i].children.size()) return false;
    for (std::size_t j = 0; j < a.edges[i].children.size(); ++j) {
      const auto& x = a.edges[i].children[j];
      const auto& y = b.edges[i].children[j];
      if (x.index() != y.index()) return false;
      if (std::holds_alternative<DNode>(x)) {
        const auto& dx = std::get<DNode>(x);
        const auto& dy = std::get<DNode>(y);
        if (dx.sigma != dy.sigma || !form_equal(*dx.inner, *dy.inner)) return false;
      }
    }
  }
  return true;
}

std::size_t form_dnode_count(const FormExpr& e) {
  std::size_t n = 0;
  for (const auto& edge : e.edges)
    for (const auto& child : edge.children)
      if (std::holds_alternative<DNode>(child)) n += 1 + form_dnode_count(*std::get<DNode>(child).inner);
  return n;
}

// ---- gradients -----------------------------------------------------------------

GradientRecord& GradientRecord::accumulate(const GradientRecord& other, double w) {
  for (auto& [id, m] : d_weights) m += cplx(w) * other.d_weights.at(id);
  for (auto& [id, m] : d_framings) m += cplx(w) * other.d_framings.at(id);
  if (field == Field::complex_) {
    for (auto& [id, m] : dbar_weights) m += cplx(w) * other.dbar_weights.at(id);
    for (auto& [id, m] : dbar_framings) m += cplx(w) * other.dbar_framings.at(id);
  }
  return *this;
}

double GradientRecord::norm() const {
  double s = 0.0;
  for (const auto& [id, m] : d_weights) s += frobenius(m) * frobenius(m);
  for (const auto& [id, m] : d_framings) s += frobenius(m) * frobenius(m);
  return std::sqrt(s);
}

GradientRecord zero_gradient(const Quiver& q, const DimData& dims, Field field) {
  GradientRecord g;
  g.field = field;
  for (const auto& a : q.arrows()) g.d_weights[a.id] = Mat(dims.dim(a.head), dims.dim(a.tail));
  for (const auto& v : q.vertices()) g.d_framings[v] = Mat(dims.dim(v), dims.framing(v));
  if (field == Field::complex_) {
    g.dbar_weights = g.d_weights;
    g.dbar_framings = g.d_framings;
  }
  return g;
}

namespace {

// Reverse pass working state: adjoints adj(X) = dJ/dXbar for J = Re(seed^H out).
struct Adjoints {
  std::map<std::string, Mat> w;  // per arrow
  std::map<std::string, Mat> e;  // per vertex framing
  std::map<std::string, Mat> H;  // per vertex metric matrix

  void add_w(const std::string& id, const Mat& m) {
    auto it = w.find(id);
    if (it == w.end())
      w.emplace(id, m);
    else
      it->second += m;
  }
  void add_e(const std::string& id, const Mat& m) {
    auto it = e.find(id);
    if (it == e.end())
      e.emplace(id, m);
    else
      it->second += m;
  }
  void add_H(const std::string& id, const Mat& m) {
    auto it = H.find(id);
    if (it == H.end())
      H.emplace(id, m);
    else
      it->second += m;
  }
};

// adj(P) for a path product P = w_{a_{L-1}} ... w_{a_0}, distributed to the arrows:
// adj(w_{a_l}) += suffix_l^H adj(P) prefix_l^H.
void backprop_path_product(const std::vector<std::string>& arrows, const FramedRep& r,
                           const Mat& adjP, Adjoints& adj) {
  const std::size_t L = arrows.size();
  std::vector<Mat> prefix(L + 1);  // prefix[l] = product of the first l arrows
  prefix[0] = Mat::identity(r.weight(arrows[0]).cols());
  for (std::size_t l = 0; l < L; ++l) prefix[l + 1] = r.weight(arrows[l]) * prefix[l];
  std::vector<Mat> suffix(L + 1);  // suffix[l] = product of arrows l..L-1
  suffix[L] = Mat::identity(r.weight(arrows[L - 1]).rows());
  for (std::size_t l = L; l-- > 0;) suffix[l] = suffix[l + 1] * r.weight(arrows[l]);
  for (std::size_t l = 0; l < L; ++l)
    adj.add_w(arrows[l], adjoint(suffix[l + 1]) * adjP * adjoint(prefix[l]));
}

// Walks the differentiated form tree and the cached evaluation nodes in
// lockstep (they are isomorphic by construction): each form edge pairs the
// d(coef) label with the 0-form leaf, and its D-node routes the chain rule.
void backprop_node(const FormExpr& form, const TreeEvaluator::Node& node, const Mat& adj_value,
                   const Inputs& inputs, const Quiver& q, const DimData& dims, const FramedRep& r,
                   const MetricState& m, Field field,
                   const std::map<const TreeEvaluator::Node*, Mat>& pre_acts, Adjoints& adj) {
  for (std::size_t ti = 0; ti < node.terms.size(); ++ti) {
    const auto& tc = node.terms[ti];
    const FormEdge& edge = form.edges[ti];
    // 0-form leaf: the argument value paired against d(coef)
    Mat u;
    Mat x;  // pre-activation, when the argument is an activation
    const ActivationSpec* act = nullptr;
    if (tc.child) {
      act = &ActivationSpec::get(std::get<ActArg>(tc.term->arg).sigma);
      x = pre_acts.at(tc.child.get());
      u = apply_pointwise(*act, x, false, field);
    } else {
      u = inputs.at(std::get<InputArg>(tc.term->arg).slot);
    }
    const HattedElement& h = edge.dcoef;
    const Mat& es = r.framing(h.source);
    const Mat& et = r.framing(h.target);
    const Mat& Ht = m.at(h.target).H;

    // d(coef) against the leaf value: C = P1 W e_s, adj(C) = adj_value u^H
    const Mat Lambda = matmul_nc(adj_value, u);
    const Mat P1W = tc.P1 * tc.W;
    adj.add_e(h.source, adjoint(P1W) * Lambda);
    const Mat adjW = adjoint(tc.P1) * Lambda * adjoint(es);
    for (const auto& ht : h.terms) {
      if (ht.path.trivial()) continue;  // identity block, no parameters
      backprop_path_product(ht.path.arrows, r, std::conj(ht.coef) * adjW, adj);
    }
    const Mat Wes = tc.W * es;
    const Mat adjP1 = Lambda * adjoint(Wes);
    adj.add_e(h.target, Ht * adjoint(adjP1));
    adj.add_H(h.target, et * adjP1);

    // D-node: chain rule through the activation into the inner form
    for (const auto& child : edge.children) {
      if (!std::holds_alternative<DNode>(child)) continue;
      const auto& dn = std::get<DNode>(child);
      const Mat df = apply_pointwise(*act, x, true, field);
      Mat adj_x = adjoint(tc.C) * adj_value;
      for (std::size_t i = 0; i < adj_x.size(); ++i)
        adj_x.data()[i] *= std::conj(df.data()[i]);
      backprop_node(*dn.inner, *tc.child, adj_x, inputs, q, dims, r, m, field, pre_acts, adj);
    }
  }
}

// Chain the metric adjoints through gram assembly into weights and framings.
void backprop_metric(const Quiver& q, const DimData& dims, const FramedRep& r,
                     const MetricState& m, Adjoints& adj) {
  for (auto& [v, S] : adj.H) {
    const Mat& H = m.at(v).H;
    Mat T = -(H * S * H);        // adj(gram)
    T = cplx(0.5) * (T + adjoint(T));  // symmetrized once; each quadratic term
    const std::size_t d = dims.dim(v);
    const Mat& e = r.framing(v);
    const std::size_t k = std::min(d, e.cols());
    // eps eps^H and alpha_e b b^H
    const Mat two_T = cplx(2.0) * T;
    const Mat adj_e_eps = two_T * col_block(e, 0, k);
    Mat adj_e_full(e.rows(), e.cols());
    set_col_block(adj_e_full, 0, adj_e_eps);
    const double alpha_e = m.alpha.at(v, 0);
    if (e.cols() > k && alpha_e != 0.0) {
      const Mat adj_b = cplx(2.0 * alpha_e) * (T * col_block(e, k, e.cols()));
      set_col_block(adj_e_full, k, adj_b);
    }
    adj.add_e(v, adj_e_full);
    // source-rooted path terms
    const auto& paths = q.paths_into(v);
    for (std::size_t idx = 1; idx < paths.size(); ++idx) {
      const Path& p = paths[idx];
      const std::string& src = q.path_source(p);
      if (!q.is_source(src)) continue;
      const double a = m.alpha.at(v, idx);
      if (a == 0.0) continue;
      const Mat& esrc = r.framing(src);
      if (esrc.cols() == 0) continue;
      const Mat M = eval_path(q, r, p);
      const Mat adjM = cplx(2.0 * a) * (T * M);
      const Mat adjProd = matmul_nc(adjM, esrc);  // adj(w_gamma) = adjM e_src^H
      backprop_path_product(p.arrows, r, adjProd, adj);
      // adj(e_src) += Prod^H adjM
      Mat prod = r.weight(p.arrows.front());
      for (std::size_t l = 1; l < p.arrows.size(); ++l) prod = r.weight(p.arrows[l]) * prod;
      adj.add_e(src, adjoint(prod) * adjM);
    }
  }
}

}  // namespace

GradientRecord TreeEvaluator::backprop(const Inputs& inputs, const Mat& seed_covector) const {
  if (seed_covector.rows() != out_dim_ || seed_covector.cols() != 1)
    throw ShapeMismatch("seed covector has wrong shape");
  std::map<const Node*, Mat> pre_acts;
  (void)eval_node(*root_, inputs, dims_, r_.field, &pre_acts);

  Adjoints adj;
  const Mat adj_out = cplx(0.5) * seed_covector;  // adj(out) for J = Re(seed^H out)
  backprop_node(form_.root, *root_, adj_out, inputs, q_, dims_, r_, m_, r_.field, pre_acts, adj);
  backprop_metric(q_, dims_, r_, m_, adj);

  GradientRecord g = zero_gradient(q_, dims_, r_.field);
  auto emit = [&](std::map<std::string, Mat>& dst, std::map<std::string, Mat>& dstbar,
                  const std::map<std::string, Mat>& src) {
    for (const auto& [id, a] : src) {
      if (g.field == Field::real) {
        Mat plain = a;
        for (std::size_t i = 0; i < plain.size(); ++i)
          plain.data()[i] = 2.0 * plain.data()[i].real();
        dst.at(id) += plain;
      } else {
        dst.at(id) += conj(a);
        dstbar.at(id) += a;
      }
    }
  };
  emit(g.d_weights, g.dbar_weights, adj.w);
  emit(g.d_framings, g.dbar_framings, adj.e);
  return g;
}

Mat forward(const AlgorithmTree& t, const Quiver& q, const DimData& dims, const FramedRep& r,
            const MetricState& m, const Inputs& inputs) {
  return TreeEvaluator(t, q, dims, r, m).forward(inputs);
}

GradientRecord backprop(const AlgorithmTree& t, const Quiver& q, const DimData& dims,
                        const FramedRep& r, const MetricState& m, const Inputs& inputs,
                        const Mat& seed_covector) {
  return TreeEvaluator(t, q, dims, r, m).backprop(inputs, seed_covector);
}

// ---- builders ------------------------------------------------------------------

AlgorithmTree make_layered_tree(const Quiver& q, const std::vector<std::string>& input_vertices,
                                const std::vector<std::string>& hidden_vertices,
                                const std::string& output_vertex, const std::string& sigma) {
  AlgorithmTree t;
  t.root.target = output_vertex;
  for (const auto& h : hidden_vertices) {
    // inner sum over input slots feeding h
    Expr inner;
    inner.target = h;
    for (const auto& in : input_vertices) {
      for (const auto& a : q.arrows()) {
        if (a.tail == in && a.head == h) {
          HattedElement coef;
          coef.source = in;
          coef.target = h;
          coef.terms.push_back({cplx(1.0), Path{h, {a.id}}});
          inner.terms.push_back({std::move(coef), InputArg{in}});
        }
      }
    }
    if (inner.terms.empty()) continue;
    // output coefficient over the h -> out arrow
    for (const auto& a : q.arrows()) {
      if (a.tail == h && a.head == output_vertex) {
        HattedElement coef;
        coef.source = h;
        coef.target = output_vertex;
        coef.terms.push_back({cplx(1.0), Path{output_vertex, {a.id}}});
        t.root.terms.push_back(
            {std::move(coef), ActArg{sigma, std::make_shared<const Expr>(inner)}});
      }
    }
  }
  if (t.root.terms.empty()) throw TypeCheckFailure("make_layered_tree: no layer arrows found");
  return t;
}

}  // namespace qnr
