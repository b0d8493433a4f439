#include "qnr/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qnr/constants.hpp"
#include "qnr/qfa.hpp"

namespace qnr::cli {

namespace fs = std::filesystem;

Dataset ingest_csv(const std::string& path,
                   const std::map<std::string, std::vector<std::string>>& input_cols,
                   const std::vector<std::string>& target_cols) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw BadHeader("empty dataset file");
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(s);
    while (std::getline(ss, cell, ',')) {
      while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
      std::size_t b = 0;
      while (b < cell.size() && cell[b] == ' ') ++b;
      out.push_back(cell.substr(b));
    }
    return out;
  };
  const std::vector<std::string> header = split(line);
  std::map<std::string, std::size_t> col_of;
  for (std::size_t i = 0; i < header.size(); ++i) col_of[header[i]] = i;
  auto need = [&](const std::string& name) -> std::size_t {
    auto it = col_of.find(name);
    if (it == col_of.end()) throw BadHeader("missing column '" + name + "'");
    return it->second;
  };
  std::map<std::string, std::vector<std::size_t>> in_idx;
  for (const auto& [slot, cols] : input_cols) {
    for (const auto& c : cols) in_idx[slot].push_back(need(c));
  }
  std::vector<std::size_t> tgt_idx;
  for (const auto& c : target_cols) tgt_idx.push_back(need(c));

  Dataset ds;
  std::size_t rownum = 0;
  while (std::getline(in, line)) {
    ++rownum;
    if (line.empty()) continue;
    const std::vector<std::string> cells = split(line);
    auto parse = [&](std::size_t col) -> double {
      if (col >= cells.size()) throw NonNumericCell(rownum, col, "<missing>");
      const std::string& s = cells[col];
      std::size_t pos = 0;
      double v = 0.0;
      try {
        v = std::stod(s, &pos);
      } catch (...) {
        throw NonNumericCell(rownum, col, s);
      }
      if (pos != s.size()) throw NonNumericCell(rownum, col, s);
      return v;
    };
    Sample sample;
    for (const auto& [slot, idxs] : in_idx) {
      Mat v(idxs.size(), 1);
      for (std::size_t i = 0; i < idxs.size(); ++i) v(i, 0) = parse(idxs[i]);
      sample.inputs[slot] = std::move(v);
    }
    Mat t(tgt_idx.size(), 1);
    for (std::size_t i = 0; i < tgt_idx.size(); ++i) t(i, 0) = parse(tgt_idx[i]);
    sample.target = std::move(t);
    ds.push_back(std::move(sample));
  }
  return ds;
}

namespace {

struct Experiment {
  json config;
  fs::path base_dir;  // directory of the config file, for relative paths
  fs::path out_dir;
  std::uint64_t seed = 0;
};

FramedRep load_rep(const json& spec, const Quiver& q, const DimData& dims, Field field,
                   const fs::path& base) {
  if (spec.is_string()) {
    const std::string s = spec.get<std::string>();
    for (const std::string prefix : {"random:", "random-chart:"}) {
      if (s.rfind(prefix, 0) != 0) continue;
      const auto rest = s.substr(prefix.size());
      const auto colon = rest.find(':');
      const std::uint64_t seed = std::stoull(rest.substr(0, colon));
      const double scale = (colon == std::string::npos) ? 1.0 : std::stod(rest.substr(colon + 1));
      return prefix == "random:" ? random_rep(q, dims, seed, scale, field)
                                 : random_chart_rep(q, dims, seed, scale, field);
    }
    std::ifstream in(base / s);
    if (!in) throw ConfigError("cannot open representation file '" + s + "'");
    json j;
    in >> j;
    return rep_from_json(j);
  }
  return rep_from_json(spec);
}

Field field_from(const json& cfg) {
  const std::string f = cfg.value("field", "real");
  if (f == "real") return Field::real;
  if (f == "complex") return Field::complex_;
  throw ConfigError("field must be 'real' or 'complex'");
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  if (!out) throw ConfigError("cannot write '" + p.string() + "'");
  out << text;
}

json run_forward(const Experiment& ex) {
  const json& cfg = ex.config;
  const Quiver q = quiver_from_json(cfg.at("quiver"));
  const DimData dims = dims_from_json(cfg.at("dims"));
  const Field field = field_from(cfg);
  const FramedRep rep = load_rep(cfg.at("rep"), q, dims, field, ex.base_dir);
  const AlphaWeights alpha = alpha_from_json(cfg.at("alpha"), q);
  const AlgorithmTree tree = tree_from_json(cfg.at("tree"));
  Inputs inputs;
  for (const auto& [slot, vec] : cfg.at("inputs").items()) {
    Mat v(vec.size(), 1);
    for (std::size_t i = 0; i < vec.size(); ++i)
      v(i, 0) = vec[i].is_number() ? cplx(vec[i].get<double>())
                                   : cplx(vec[i][0].get<double>(), vec[i][1].get<double>());
    inputs[slot] = std::move(v);
  }
  const MetricState m = metric_state(q, dims, rep, alpha);
  const Mat out = forward(tree, q, dims, rep, m, inputs);
  json jout = json::array();
  for (std::size_t i = 0; i < out.rows(); ++i)
    jout.push_back(out(i, 0).imag() == 0.0
                       ? json(out(i, 0).real())
                       : json::array({out(i, 0).real(), out(i, 0).imag()}));
  return json{{"output", std::move(jout)}};
}

// Independent scalar recomputation of every H_i for all-ones dimension
// vectors; exercises none of the matrix machinery.
double scalar_reference_max_dev(const Quiver& q, const DimData& dims, const FramedRep& r,
                                const AlphaWeights& alpha, const MetricState& m) {
  double dev = 0.0;
  for (const auto& v : q.vertices()) {
    double gram = std::norm(r.framing(v)(0, 0));
    const auto& paths = q.paths_into(v);
    for (std::size_t i = 1; i < paths.size(); ++i) {
      const Path& p = paths[i];
      if (!q.is_source(q.path_source(p))) continue;
      cplx prod = r.framing(q.path_source(p))(0, 0);
      for (const auto& aid : p.arrows) prod *= r.weight(aid)(0, 0);
      gram += alpha.at(v, i) * std::norm(prod);
    }
    dev = std::max(dev, std::abs(m.at(v).H(0, 0) - cplx(1.0 / gram)));
  }
  return dev;
}

json run_metric_check(const Experiment& ex) {
  const json& cfg = ex.config;
  const Quiver q = quiver_from_json(cfg.at("quiver"));
  const DimData dims = dims_from_json(cfg.at("dims"));
  const Field field = field_from(cfg);
  FramedRep rep = load_rep(cfg.at("rep"), q, dims, field, ex.base_dir);
  const AlphaWeights alpha = alpha_from_json(cfg.at("alpha"), q);
  if (cfg.value("gauge_fix", true)) rep = gauge_fix(q, dims, rep).first;
  const MetricState m = metric_state(q, dims, rep, alpha);
  json per_vertex = json::object();
  double worst_inv = 0.0, worst_herm = 0.0;
  for (const auto& v : q.vertices()) {
    const auto& vm = m.at(v);
    const double inv_res = max_abs(vm.H * vm.gram - Mat::identity(vm.gram.rows()));
    double herm = 0.0;
    for (std::size_t i = 0; i < vm.gram.rows(); ++i)
      for (std::size_t j = 0; j < vm.gram.cols(); ++j)
        herm = std::max(herm, std::abs(vm.gram(i, j) - std::conj(vm.gram(j, i))));
    worst_inv = std::max(worst_inv, inv_res);
    worst_herm = std::max(worst_herm, herm);
    per_vertex[v] = json{{"min_eig", min_eigenvalue_hermitian(vm.gram)},
                         {"logdet", vm.logdet},
                         {"inverse_residual", inv_res}};
  }
  json out{{"per_vertex", std::move(per_vertex)},
           {"max_inverse_residual", worst_inv},
           {"max_hermiticity_residual", worst_herm}};
  bool all_scalar = true;
  for (const auto& v : q.vertices())
    if (dims.dim(v) != 1 || dims.framing(v) != 1) all_scalar = false;
  if (all_scalar)
    out["scalar_reference_max_dev"] = scalar_reference_max_dev(q, dims, rep, alpha, m);
  return out;
}

json run_qfa_accept(const Experiment& ex) {
  const Qfa m = qfa_from_json(ex.config.at("qfa"));
  const Word w = ex.config.at("word").get<Word>();
  return json{{"pr", acceptance_probability(m, w)}};
}

json run_qfa_dist(const Experiment& ex, const fs::path& out_dir) {
  const json& cfg = ex.config;
  QuantumMachine machine;
  AlgorithmTree tree;
  Mat input;
  if (cfg.contains("qfa")) {
    const Qfa m = qfa_from_json(cfg.at("qfa"));
    machine = machine_from_qfa(m);
    tree = one_measurement_program(cfg.at("word").get<Word>());
    input = m.q0;
  } else {
    machine = machine_from_json(cfg.at("machine"));
    tree = tree_from_json(cfg.at("tree"));
    const auto& vec = cfg.at("input");
    input = Mat(vec.size(), 1);
    for (std::size_t i = 0; i < vec.size(); ++i)
      input(i, 0) = vec[i].is_number() ? cplx(vec[i].get<double>())
                                       : cplx(vec[i][0].get<double>(), vec[i][1].get<double>());
  }
  const OutcomeDistribution exact = exact_distribution(tree, machine, input);
  json dist{{"exact", distribution_to_json(exact)}};
  json summary{{"outcome_count", exact.p.size()}, {"exact_total", exact.total()}};
  if (cfg.contains("samples")) {
    const std::size_t n = cfg.at("samples").get<std::size_t>();
    const OutcomeDistribution emp = sample_program(tree, machine, input, ex.seed, n);
    dist["empirical"] = distribution_to_json(emp);
    const double tv = exact.total_variation(emp);
    dist["total_variation"] = tv;
    summary["samples"] = n;
    summary["total_variation"] = tv;
  }
  write_file(out_dir / "dist.json", dist.dump(2) + "\n");
  return summary;
}

json run_train(const Experiment& ex, const fs::path& out_dir) {
  const json& cfg = ex.config;
  const Quiver q = quiver_from_json(cfg.at("quiver"));
  const DimData dims = dims_from_json(cfg.at("dims"));
  const Field field = field_from(cfg);
  const FramedRep rep0 = load_rep(cfg.at("rep"), q, dims, field, ex.base_dir);
  const bool learned =
      cfg.at("alpha").is_string() && cfg.at("alpha").get<std::string>() == "learned";
  // learned mode starts from the all-ones weights
  const AlphaWeights alpha0 =
      learned ? AlphaWeights::moduli(q) : alpha_from_json(cfg.at("alpha"), q);
  const AlgorithmTree tree = tree_from_json(cfg.at("tree"));

  const json& dcfg = cfg.at("dataset");
  std::map<std::string, std::vector<std::string>> input_cols;
  for (const auto& [slot, cols] : dcfg.at("inputs").items())
    input_cols[slot] = cols.get<std::vector<std::string>>();
  const Dataset ds = ingest_csv((ex.base_dir / dcfg.at("path").get<std::string>()).string(),
                                input_cols, dcfg.at("target").get<std::vector<std::string>>());

  const json& tcfg = cfg.at("train");
  TrainConfig tc;
  tc.lr = tcfg.at("lr").get<double>();
  tc.epochs = tcfg.at("epochs").get<std::size_t>();
  tc.batch_size = tcfg.value("batch", std::size_t{0});
  tc.ridge = tcfg.value("ridge", -1.0);
  tc.seed = ex.seed;
  tc.refix_period = tcfg.value("refix_period", std::size_t{1});
  tc.backtrack = tcfg.value("backtrack", false);
  tc.learn_alpha = learned;
  if (tc.lr <= 0.0) throw ConfigError("train.lr must be positive");

  const TrainResult res = train(tree, q, dims, rep0, alpha0, ds, tc);

  std::ofstream trace(out_dir / "trace.jsonl");
  for (const auto& row : res.trace.rows) trace << trace_row_to_json(row).dump() << "\n";
  write_file(out_dir / "model.json", rep_to_json(res.rep).dump(2) + "\n");

  const double final_cost = res.trace.rows.empty() ? cost(tree, q, dims, res.rep, res.alpha, ds)
                                                   : res.trace.rows.back().cost;
  return json{{"final_cost", final_cost},
              {"epochs", tc.epochs},
              {"steps", res.trace.rows.size()},
              {"model", "model.json"},
              {"trace", "trace.jsonl"}};
}

}  // namespace

int run(const std::string& config_path, const std::optional<std::string>& out_dir,
        const std::optional<std::uint64_t>& seed_override) {
  const auto t0 = std::chrono::steady_clock::now();
  Experiment ex;
  json result;
  std::string command;
  int code = 0;
  try {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot open config '" + config_path + "'");
    in >> ex.config;
    ex.base_dir = fs::path(config_path).parent_path();
    command = ex.config.at("command").get<std::string>();
    ex.out_dir = out_dir ? fs::path(*out_dir)
                         : fs::path(ex.config.value("out", std::string("out")));
    if (ex.out_dir.is_relative() && !out_dir) ex.out_dir = ex.base_dir / ex.out_dir;
    fs::create_directories(ex.out_dir);
    ex.seed = seed_override ? *seed_override : ex.config.value("seed", std::uint64_t{0});
    if (ex.config.contains("train") && ex.config.at("train").contains("seed") && !seed_override)
      ex.seed = ex.config.at("train").at("seed").get<std::uint64_t>();

    json payload;
    if (command == "forward")
      payload = run_forward(ex);
    else if (command == "metric-check")
      payload = run_metric_check(ex);
    else if (command == "qfa-accept")
      payload = run_qfa_accept(ex);
    else if (command == "qfa-dist")
      payload = run_qfa_dist(ex, ex.out_dir);
    else if (command == "train")
      payload = run_train(ex, ex.out_dir);
    else
      throw ConfigError("unknown command '" + command + "'");
    result = std::move(payload);
    result["ok"] = true;
  } catch (const NotSpaceLike& e) {
    result = json{{"ok", false},
                  {"error", {{"type", "NotSpaceLike"},
                             {"message", e.what()},
                             {"vertex", e.vertex},
                             {"min_eigenvalue", e.min_eigenvalue}}}};
    code = 3;
  } catch (const StepRejected& e) {
    result = json{{"ok", false}, {"error", {{"type", "StepRejected"}, {"message", e.what()}}}};
    code = 3;
  } catch (const ZeroVector& e) {
    result = json{{"ok", false}, {"error", {{"type", "ZeroVector"}, {"message", e.what()}}}};
    code = 3;
  } catch (const SingularGauge& e) {
    result = json{{"ok", false}, {"error", {{"type", "SingularGauge"}, {"message", e.what()}}}};
    code = 3;
  } catch (const Error& e) {
    result = json{{"ok", false}, {"error", {{"type", "ValidationError"}, {"message", e.what()}}}};
    code = 2;
  } catch (const json::exception& e) {
    result = json{{"ok", false}, {"error", {{"type", "ConfigError"}, {"message", e.what()}}}};
    code = 2;
  }

  const auto t1 = std::chrono::steady_clock::now();
  result["command"] = command;
  result["config_hash"] = ex.config.is_null() ? "" : config_hash(ex.config);
  result["seed"] = ex.seed;
  result["tolerances"] = tolerances_to_json();
  result["wall_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
  try {
    if (ex.out_dir.empty()) ex.out_dir = ".";
    fs::create_directories(ex.out_dir);
    write_file(ex.out_dir / "result.json", result.dump(2) + "\n");
  } catch (...) {
    return code == 0 ? 2 : code;
  }
  return code;
}

}  // namespace qnr::cli
