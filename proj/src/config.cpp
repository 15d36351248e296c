#include "wgt/config.hpp"

#include <cerrno>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

#include "wgt/errors.hpp"

namespace wgt {

using nlohmann::json;

namespace {

// Literals built in C++ come through as signed integers, parsed text as unsigned.
bool is_count(const json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0);
}

// Reads one JSON object and rejects keys nobody asked for.
class Section {
 public:
  Section(const json& node, std::string name) : node_(node), name_(std::move(name)) {
    if (!node_.is_object()) throw ConfigError(name_ + ": expected an object");
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return node_.at(key);
  }

  template <typename T>
  void read(const std::string& key, T& out) {
    if (!has(key)) return;
    const json& v = raw(key);
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw ConfigError("");
      } else if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
        if (!is_count(v)) throw ConfigError("");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError("");
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError("");
      }
      out = v.get<T>();
    } catch (const std::exception&) {
      throw ConfigError(path(key) + ": wrong type");
    }
  }

  template <typename T>
  void read_list(const std::string& key, std::vector<T>& out) {
    if (!has(key)) return;
    const json& v = raw(key);
    if (!v.is_array()) throw ConfigError(path(key) + ": expected a list");
    out.clear();
    for (const auto& item : v) {
      if constexpr (std::is_unsigned_v<T>) {
        if (!is_count(item)) throw ConfigError(path(key) + ": expected integers >= 0");
      } else {
        if (!item.is_number()) throw ConfigError(path(key) + ": expected numbers");
      }
      out.push_back(item.get<T>());
    }
  }

  std::string path(const std::string& key) const { return name_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : node_.items()) {
      if (!seen_.count(key)) throw ConfigError(path(key) + ": unknown key");
    }
  }

 private:
  const json& node_;
  std::string name_;
  std::set<std::string> seen_;
};

void parse_graph(Section& s, ScenarioConfig& c) {
  if (s.has("preset") && (s.has("edges") || s.has("n"))) {
    throw ConfigError("graph: give either preset or n + edges");
  }
  if (s.has("edges") || s.has("n")) {
    c.graph_preset.clear();
    s.read("n", c.agents);
    if (c.agents == 0) throw ConfigError("graph.n must be >= 1");
    if (!s.has("edges")) throw ConfigError("graph.edges missing");
    const json& edges = s.raw("edges");
    if (!edges.is_array()) throw ConfigError("graph.edges: expected a list of [from, to] pairs");
    c.edges.clear();
    for (const auto& e : edges) {
      if (!e.is_array() || e.size() != 2 || !is_count(e[0]) || !is_count(e[1])) {
        throw ConfigError("graph.edges: expected [from, to] pairs of 1-based agent ids");
      }
      try {
        c.edges.push_back(Edge{from_external_id(e[0].get<std::size_t>(), c.agents),
                               from_external_id(e[1].get<std::size_t>(), c.agents)});
      } catch (const DomainError& err) {
        throw ConfigError(std::string("graph.edges: ") + err.what());
      }
    }
  } else {
    s.read("preset", c.graph_preset);
  }
  s.finish();
}

void parse_weights(Section& s, ScenarioConfig& c) {
  std::string scheme = to_string(c.weight_scheme);
  s.read("scheme", scheme);
  try {
    c.weight_scheme = weight_scheme_from_string(scheme);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("weights.scheme: ") + e.what());
  }
  s.read("jitter", c.weight_jitter);
  s.read("seed", c.weight_seed);
  s.finish();
}

void parse_objective(Section& s, ScenarioConfig& c) {
  s.read("d", c.rows);
  s.read("p", c.dim);
  s.read("r", c.regularization);
  s.read("seed", c.objective_seed);
  s.finish();
}

void parse_algorithm(Section& s, ScenarioConfig& c) {
  std::string mode = to_string(c.mode);
  s.read("mode", mode);
  try {
    c.mode = mode_from_string(mode);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("algorithm.mode: ") + e.what());
  }
  if (s.has("alpha")) {
    const json& a = s.raw("alpha");
    if (a.is_number()) {
      c.alpha = {a.get<double>()};
    } else if (a.is_array() && !a.empty()) {
      c.alpha.clear();
      for (const auto& v : a) {
        if (!v.is_number()) throw ConfigError("algorithm.alpha: expected numbers");
        c.alpha.push_back(v.get<double>());
      }
    } else {
      throw ConfigError("algorithm.alpha: expected a number or a non-empty list");
    }
  }
  if (s.has("lambda")) {
    Section lam(s.raw("lambda"), "algorithm.lambda");
    if (lam.has("constant")) {
      if (lam.has("e") || lam.has("m")) {
        throw ConfigError("algorithm.lambda: give either constant or e + m");
      }
      double v = 0.0;
      lam.read("constant", v);
      c.lambda_constant = v;
    } else {
      c.lambda_constant.reset();
      lam.read("e", c.lambda_e);
      lam.read("m", c.lambda_m);
    }
    lam.finish();
  }
  s.read("iterations", c.iterations);
  s.read("init_seed", c.init_seed);
  s.finish();
}

void parse_report(Section& s, ScenarioConfig& c) {
  s.read("threshold", c.threshold);
  s.read("output_dir", c.output_dir);
  s.read("admissibility_horizon", c.admissibility_horizon);
  s.read("export_matrices", c.export_matrices);
  s.read("dump_ensemble", c.dump_ensemble);
  s.finish();
}

void parse_attack(Section& s, ScenarioConfig& c) {
  if (s.has("target")) {
    std::size_t id = 0;
    s.read("target", id);
    if (id == 0) throw ConfigError("attack.target: agent ids are 1-based");
    c.attack.target = id - 1;
  }
  s.read("stabilization_tolerance", c.attack.stabilization_tolerance);
  s.read("stabilization_window", c.attack.stabilization_window);
  s.read("audit_horizon", c.attack.audit_horizon);
  s.finish();
}

void parse_sweep(Section& s, ScenarioConfig& c) {
  s.read_list("alpha", c.sweep.alpha);
  s.read_list("lambda_e", c.sweep.lambda_e);
  s.read_list("lambda_m", c.sweep.lambda_m);
  s.read_list("seeds", c.sweep.seeds);
  s.finish();
}

void check_values(const ScenarioConfig& c) {
  if (c.rows == 0 || c.dim == 0) throw ConfigError("objective: d and p must be >= 1");
  if (!(c.regularization >= 0.0)) throw ConfigError("objective.r must be >= 0");
  for (double a : c.alpha) {
    if (!(a > 0.0)) throw ConfigError("algorithm.alpha entries must be > 0");
  }
  if (!c.lambda_constant) {
    if (!(c.lambda_e > 0.0)) throw ConfigError("algorithm.lambda.e must be > 0");
    if (!(c.lambda_m >= 0.0)) throw ConfigError("algorithm.lambda.m must be >= 0");
  } else if (!(*c.lambda_constant > 0.0)) {
    throw ConfigError("algorithm.lambda.constant must be > 0");
  }
  if (c.iterations == 0) throw ConfigError("algorithm.iterations must be >= 1");
  if (!(c.threshold > 0.0)) throw ConfigError("report.threshold must be > 0");
  if (c.admissibility_horizon == 0) throw ConfigError("report.admissibility_horizon must be >= 1");
  if (c.attack.stabilization_window == 0) throw ConfigError("attack.stabilization_window must be >= 1");
  if (!(c.attack.stabilization_tolerance > 0.0)) {
    throw ConfigError("attack.stabilization_tolerance must be > 0");
  }
  for (double a : c.sweep.alpha) {
    if (!(a > 0.0)) throw ConfigError("sweep.alpha entries must be > 0");
  }
  for (double e : c.sweep.lambda_e) {
    if (!(e > 0.0)) throw ConfigError("sweep.lambda_e entries must be > 0");
  }
  for (double m : c.sweep.lambda_m) {
    if (!(m >= 0.0)) throw ConfigError("sweep.lambda_m entries must be >= 0");
  }
}

}  // namespace

ScenarioConfig parse_config(const json& doc) {
  ScenarioConfig c;
  Section top(doc, "config");
  if (!top.has("schema")) throw ConfigError("config.schema missing");
  top.read("schema", c.schema);
  if (c.schema != kConfigSchema) {
    throw ConfigError("config.schema " + std::to_string(c.schema) + " is not supported");
  }
  auto section = [&](const char* key, auto parse) {
    if (!top.has(key)) return;
    Section s(top.raw(key), key);
    parse(s, c);
  };
  section("graph", parse_graph);
  section("weights", parse_weights);
  section("objective", parse_objective);
  section("algorithm", parse_algorithm);
  section("report", parse_report);
  section("attack", parse_attack);
  section("sweep", parse_sweep);
  top.finish();
  check_values(c);
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::system_error(std::make_error_code(std::errc::no_such_file_or_directory),
                            path.string());
  }
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

json to_json(const ScenarioConfig& c) {
  json graph;
  if (c.graph_preset.empty()) {
    json edges = json::array();
    for (const auto& e : c.edges) edges.push_back({to_external_id(e.from), to_external_id(e.to)});
    graph = {{"n", c.agents}, {"edges", edges}};
  } else {
    graph = {{"preset", c.graph_preset}};
  }
  json lambda = c.lambda_constant ? json{{"constant", *c.lambda_constant}}
                                  : json{{"e", c.lambda_e}, {"m", c.lambda_m}};
  json alpha = c.alpha.size() == 1 ? json(c.alpha.front()) : json(c.alpha);
  return json{
      {"schema", c.schema},
      {"graph", graph},
      {"weights", {{"scheme", to_string(c.weight_scheme)}, {"jitter", c.weight_jitter},
                   {"seed", c.weight_seed}}},
      {"objective", {{"d", c.rows}, {"p", c.dim}, {"r", c.regularization},
                     {"seed", c.objective_seed}}},
      {"algorithm", {{"mode", to_string(c.mode)}, {"alpha", alpha}, {"lambda", lambda},
                     {"iterations", c.iterations}, {"init_seed", c.init_seed}}},
      {"report", {{"threshold", c.threshold}, {"output_dir", c.output_dir},
                  {"admissibility_horizon", c.admissibility_horizon},
                  {"export_matrices", c.export_matrices}, {"dump_ensemble", c.dump_ensemble}}},
      {"attack", {{"target", to_external_id(c.attack.target)},
                  {"stabilization_tolerance", c.attack.stabilization_tolerance},
                  {"stabilization_window", c.attack.stabilization_window},
                  {"audit_horizon", c.attack.audit_horizon}}},
      {"sweep", {{"alpha", c.sweep.alpha}, {"lambda_e", c.sweep.lambda_e},
                 {"lambda_m", c.sweep.lambda_m}, {"seeds", c.sweep.seeds}}},
  };
}

DirectedGraph build_graph(const ScenarioConfig& c) {
  try {
    if (!c.graph_preset.empty()) return DirectedGraph::preset(c.graph_preset);
    return DirectedGraph(c.agents, c.edges);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("graph: ") + e.what());
  }
}

LambdaSchedule build_lambda(const ScenarioConfig& c) {
  return c.lambda_constant ? LambdaSchedule::constant(*c.lambda_constant)
                           : LambdaSchedule::decaying(c.lambda_e, c.lambda_m);
}

Scenario build_scenario(const ScenarioConfig& c) {
  DirectedGraph g = build_graph(c);
  const std::size_t n = g.size();
  if (c.attack.target >= n) {
    throw ConfigError("attack.target " + std::to_string(to_external_id(c.attack.target)) +
                      " is not an agent of this graph");
  }
  if (c.alpha.size() != 1 && c.alpha.size() != n) {
    throw ConfigError("algorithm.alpha: list length " + std::to_string(c.alpha.size()) +
                      " does not match n = " + std::to_string(n));
  }
  StepSizes steps = c.alpha.size() == 1 ? StepSizes::uniform(n, c.alpha.front())
                                        : StepSizes(c.alpha);
  Scenario sc{
      WeightSchedule(std::move(g), c.weight_scheme, c.weight_jitter, c.weight_seed),
      make_sensor_scenario(n, c.rows, c.dim, c.regularization, c.objective_seed),
      c.mode,
      std::move(steps),
      build_lambda(c),
      c.iterations,
      c.init_seed,
      c.threshold,
  };
  validate(sc);
  return sc;
}

}  // namespace wgt
