#include "qnr/serialize.hpp"

#include <cstdint>
#include <cstdio>

#include "qnr/constants.hpp"
#include "qnr/qfa.hpp"

namespace qnr {

namespace {

json cplx_to_json(cplx z) {
  if (z.imag() == 0.0) return z.real();
  return json::array({z.real(), z.imag()});
}

cplx cplx_from_json(const json& j) {
  if (j.is_number()) return cplx(j.get<double>());
  if (j.is_array() && j.size() == 2) return cplx(j[0].get<double>(), j[1].get<double>());
  throw ConfigError("expected a number or an [re, im] pair");
}

}  // namespace

json mat_to_json(const Mat& m) {
  json data = json::array();
  for (std::size_t i = 0; i < m.size(); ++i) data.push_back(cplx_to_json(m.data()[i]));
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Mat mat_from_json(const json& j) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data"))
    throw ConfigError("matrix record needs rows/cols/data");
  Mat m(j["rows"].get<std::size_t>(), j["cols"].get<std::size_t>());
  const auto& data = j["data"];
  if (!data.is_array() || data.size() != m.size())
    throw ConfigError("matrix data length does not match shape");
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = cplx_from_json(data[i]);
  return m;
}

json quiver_to_json(const Quiver& q) {
  json arrows = json::array();
  for (const auto& a : q.arrows())
    arrows.push_back(json{{"id", a.id}, {"tail", a.tail}, {"head", a.head}});
  return json{{"vertices", q.vertices()}, {"arrows", std::move(arrows)}};
}

Quiver quiver_from_json(const json& j) {
  std::vector<std::string> vertices = j.at("vertices").get<std::vector<std::string>>();
  std::vector<Arrow> arrows;
  for (const auto& a : j.at("arrows"))
    arrows.push_back({a.at("id").get<std::string>(), a.at("tail").get<std::string>(),
                      a.at("head").get<std::string>()});
  return Quiver(std::move(vertices), std::move(arrows));
}

json dims_to_json(const DimData& d) {
  return json{{"d", d.d}, {"n", d.n}};
}

DimData dims_from_json(const json& j) {
  DimData d;
  d.d = j.at("d").get<std::map<std::string, std::size_t>>();
  d.n = j.at("n").get<std::map<std::string, std::size_t>>();
  return d;
}

json rep_to_json(const FramedRep& r) {
  json weights = json::object(), framings = json::object();
  for (const auto& [id, m] : r.weights) weights[id] = mat_to_json(m);
  for (const auto& [id, m] : r.framings) framings[id] = mat_to_json(m);
  return json{{"field", r.field == Field::real ? "real" : "complex"},
              {"weights", std::move(weights)},
              {"framings", std::move(framings)}};
}

FramedRep rep_from_json(const json& j) {
  FramedRep r;
  const std::string f = j.at("field").get<std::string>();
  if (f == "real")
    r.field = Field::real;
  else if (f == "complex")
    r.field = Field::complex_;
  else
    throw ConfigError("field must be 'real' or 'complex'");
  for (const auto& [id, m] : j.at("weights").items()) r.weights[id] = mat_from_json(m);
  for (const auto& [id, m] : j.at("framings").items()) r.framings[id] = mat_from_json(m);
  if (r.field == Field::real) {
    for (const auto& [id, m] : r.weights)
      if (max_imag(m) != 0.0) throw FieldMismatch("real representation with complex weights");
    for (const auto& [id, m] : r.framings)
      if (max_imag(m) != 0.0) throw FieldMismatch("real representation with complex framings");
  }
  return r;
}

json path_to_json(const Path& p) {
  return json{{"target", p.target}, {"arrows", p.arrows}};
}

Path path_from_json(const json& j) {
  return Path{j.at("target").get<std::string>(), j.at("arrows").get<std::vector<std::string>>()};
}

json hatted_to_json(const HattedElement& h) {
  json terms = json::array();
  for (const auto& t : h.terms)
    terms.push_back(json{{"coef", cplx_to_json(t.coef)}, {"path", path_to_json(t.path)}});
  return json{{"source", h.source}, {"target", h.target}, {"terms", std::move(terms)}};
}

HattedElement hatted_from_json(const json& j) {
  HattedElement h;
  h.source = j.at("source").get<std::string>();
  h.target = j.at("target").get<std::string>();
  for (const auto& t : j.at("terms"))
    h.terms.push_back({cplx_from_json(t.at("coef")), path_from_json(t.at("path"))});
  return h;
}

namespace {

json expr_to_json(const Expr& e);

json arg_to_json(const Arg& a) {
  if (std::holds_alternative<InputArg>(a))
    return json{{"type", "input"}, {"slot", std::get<InputArg>(a).slot}};
  const auto& act = std::get<ActArg>(a);
  return json{{"type", "act"}, {"sigma", act.sigma}, {"expr", expr_to_json(*act.expr)}};
}

json expr_to_json(const Expr& e) {
  json terms = json::array();
  for (const auto& t : e.terms)
    terms.push_back(json{
        {"type", "term"}, {"coef", hatted_to_json(t.coef)}, {"arg", arg_to_json(t.arg)}});
  return json{{"type", "sum"}, {"target", e.target}, {"terms", std::move(terms)}};
}

Expr expr_from_json(const json& j);

Arg arg_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "input") return InputArg{j.at("slot").get<std::string>()};
  if (type == "act")
    return ActArg{j.at("sigma").get<std::string>(),
                  std::make_shared<const Expr>(expr_from_json(j.at("expr")))};
  throw ConfigError("argument type must be 'input' or 'act'");
}

Expr expr_from_json(const json& j) {
  if (j.at("type").get<std::string>() != "sum") throw ConfigError("expected a 'sum' node");
  Expr e;
  e.target = j.at("target").get<std::string>();
  for (const auto& t : j.at("terms")) {
    if (t.at("type").get<std::string>() != "term") throw ConfigError("expected a 'term' node");
    e.terms.push_back({hatted_from_json(t.at("coef")), arg_from_json(t.at("arg"))});
  }
  return e;
}

}  // namespace

json tree_to_json(const AlgorithmTree& t) { return expr_to_json(t.root); }

AlgorithmTree tree_from_json(const json& j) { return AlgorithmTree{expr_from_json(j)}; }

json alpha_to_json(const AlphaWeights& a, const Quiver& q) {
  json out = json::object();
  for (const auto& v : q.vertices()) {
    const auto& paths = q.paths_into(v);
    for (std::size_t i = 0; i < paths.size(); ++i) out[paths[i].key()] = a.at(v, i);
  }
  return out;
}

AlphaWeights alpha_from_json(const json& j, const Quiver& q) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "moduli") return AlphaWeights::moduli(q);
    if (s == "euclidean") return AlphaWeights::euclidean(q);
    if (s == "hyperbolic") return AlphaWeights::hyperbolic(q);
    throw ConfigError("unknown alpha preset '" + s + "'");
  }
  if (!j.is_object()) throw ConfigError("alpha must be a preset name or a path table");
  AlphaWeights a = AlphaWeights::euclidean(q);
  for (const auto& v : q.vertices()) {
    const auto& paths = q.paths_into(v);
    for (std::size_t i = 0; i < paths.size(); ++i) {
      const std::string key = paths[i].key();
      if (!j.contains(key)) throw ConfigError("alpha table is missing path '" + key + "'");
      a.values[v][i] = j.at(key).get<double>();
    }
  }
  if (j.size() != [&] {
        std::size_t n = 0;
        for (const auto& v : q.vertices()) n += q.paths_into(v).size();
        return n;
      }())
    throw ConfigError("alpha table has keys outside the enumerated path set");
  return a;
}

namespace {

Mat unitary_from_json(const json& j, std::size_t dim) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    const std::string prefix = "random:";
    if (s.rfind(prefix, 0) == 0) {
      const std::uint64_t seed = std::stoull(s.substr(prefix.size()));
      return random_unitary(dim, seed);
    }
    throw ConfigError("unitary must be a matrix or 'random:<seed>'");
  }
  return mat_from_json(j);
}

}  // namespace

json qfa_to_json(const Qfa& m) {
  json us = json::object();
  for (const auto& [s, u] : m.unitaries) us[s] = mat_to_json(u);
  json q0 = json::array();
  for (std::size_t i = 0; i < m.q0.rows(); ++i)
    q0.push_back(json::array({m.q0(i, 0).real(), m.q0(i, 0).imag()}));
  return json{{"dim", m.dim},
              {"q0", std::move(q0)},
              {"accept", m.accept},
              {"alphabet", m.alphabet},
              {"unitaries", std::move(us)}};
}

Qfa qfa_from_json(const json& j) {
  Qfa m;
  m.dim = j.at("dim").get<std::size_t>();
  const auto& q0 = j.at("q0");
  m.q0 = Mat(q0.size(), 1);
  for (std::size_t i = 0; i < q0.size(); ++i) m.q0(i, 0) = cplx_from_json(q0[i]);
  m.accept = j.at("accept").get<std::vector<std::size_t>>();
  m.alphabet = j.at("alphabet").get<std::vector<std::string>>();
  for (const auto& [s, u] : j.at("unitaries").items())
    m.unitaries[s] = unitary_from_json(u, m.dim);
  m.validate();
  return m;
}

json machine_to_json(const QuantumMachine& m) {
  json gens = json::object();
  for (const auto& [s, u] : m.generators) gens[s] = mat_to_json(u);
  return json{{"dim", m.dim},      {"h", mat_to_json(m.h)},        {"n", m.n},
              {"e", mat_to_json(m.e)}, {"alphabet", m.alphabet}, {"generators", std::move(gens)}};
}

QuantumMachine machine_from_json(const json& j) {
  QuantumMachine m;
  m.dim = j.at("dim").get<std::size_t>();
  m.n = j.contains("n") ? j.at("n").get<std::size_t>() : m.dim;
  m.h = j.contains("h") ? mat_from_json(j.at("h")) : Mat::identity(m.dim);
  m.e = j.contains("e") ? mat_from_json(j.at("e")) : Mat::identity(m.dim);
  m.alphabet = j.at("alphabet").get<std::vector<std::string>>();
  for (const auto& [s, u] : j.at("generators").items())
    m.generators[s] = unitary_from_json(u, m.dim);
  m.validate();
  return m;
}

json distribution_to_json(const OutcomeDistribution& d) {
  json outcomes = json::array();
  for (const auto& [seq, p] : d.p)
    outcomes.push_back(json{{"sequence", seq}, {"p", p}});
  return json{{"outcomes", std::move(outcomes)}};
}

json trace_row_to_json(const TraceRow& r) {
  json j{{"epoch", r.epoch},        {"step", r.step},
         {"cost", r.cost},          {"grad_norm", r.grad_norm},
         {"step_norm", r.step_norm}, {"min_gram_eig", r.min_gram_eig}};
  if (!r.alpha_snapshot.empty()) j["alpha"] = r.alpha_snapshot;
  return j;
}

json tolerances_to_json() {
  const Tolerances& t = tolerances();
  return json{{"hermitian", t.hermitian},
              {"metric_inverse", t.metric_inverse},
              {"gauge_invariance", t.gauge_invariance},
              {"backprop_fd_rel", t.backprop_fd_rel},
              {"kahler_fd_rel", t.kahler_fd_rel},
              {"qfa_consistency", t.qfa_consistency},
              {"euclidean_match", t.euclidean_match},
              {"space_like_margin", t.space_like_margin},
              {"distribution_sum", t.distribution_sum},
              {"xor_target_cost", t.xor_target_cost}};
}

std::string config_hash(const json& j) {
  const std::string s = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace qnr
