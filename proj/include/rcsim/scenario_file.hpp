#pragma once

// YAML scenario files. A file describes a family of scenarios: randomized
// fields (uniform initial states, uniform activation times) are drawn when
// the file is materialized for a particular seed.
//
//   graph:      {generator: fig1 | fig1_reduced | complete | clique_core, n, lambda, k}
//               | {n: 3, edges: [[0, 1], [1, 2]]} | {path: edges.txt}
//   params:     {epsilon, F, theta: 1.0, delta_min: max | [per-node list]}
//   nodes:      {x0: "uniform[0,1]" | [list]}
//   activation: {t_init, t0: "uniform[0,t_init]" | [list]}
//   attacks:    [{node, kind: acquisition | transmission | control | timing, ...}]
//   run:        {t_end, seed, output_dt, max_events, allow_excess_attackers}

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <regex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "json.hpp"
#include "rcsim/adversary.hpp"
#include "rcsim/graph.hpp"
#include "rcsim/scenario.hpp"

namespace rcsim {

class ScenarioFileError : public std::runtime_error {
 public:
  ScenarioFileError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// A named generator with its parameters, or nothing.
struct GeneratorSpec {
  std::string name;
  std::size_t n = 0;
  std::size_t lambda = 0;
  std::size_t k = 0;
};

inline Graph make_generated_graph(const GeneratorSpec& spec) {
  if (spec.name == "fig1") return gen_fig1(false);
  if (spec.name == "fig1_reduced") return gen_fig1(true);
  if (spec.name == "complete") return gen_complete(spec.n);
  if (spec.name == "clique_core") return gen_clique_core(spec.lambda, spec.k);
  throw GraphError("unknown generator '" + spec.name + "' (expected clique_core, complete, fig1, fig1_reduced)");
}

inline Graph load_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw GraphError("cannot read edge list " + path.string());
  return read_edge_list(in);
}

struct UniformRange {
  double lo = 0.0;
  double hi = 1.0;
};
struct UniformActivation {};

struct ScenarioFile {
  Graph graph;
  double epsilon = 0.01;
  std::size_t F = 0;
  double theta = 1.0;
  std::optional<std::vector<double>> delta_min;  // empty: epsilon / (4 d_i)
  std::variant<UniformRange, std::vector<double>> x0 = UniformRange{};
  double t_init = 0.0;
  std::variant<UniformActivation, std::vector<double>> t0 = UniformActivation{};
  std::vector<AttackSpec> attacks;
  double t_end = 10.0;
  std::uint64_t seed = 0;
  double output_dt = 0.01;
  std::uint64_t max_events = 100'000'000;
  bool allow_excess_attackers = false;

  std::string digest;  // of the canonical form of the document
  std::map<std::string, std::size_t> section_lines;
};

namespace detail {

inline std::size_t line_of(const YAML::Node& node) {
  const auto mark = node.Mark();
  return mark.line >= 0 ? static_cast<std::size_t>(mark.line) + 1 : 0;
}

inline std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Maps keep sorted keys, scalars keep their source spelling.
inline nlohmann::json canonical(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Map: {
      nlohmann::json out = nlohmann::json::object();
      for (const auto& kv : node) out[kv.first.as<std::string>()] = canonical(kv.second);
      return out;
    }
    case YAML::NodeType::Sequence: {
      nlohmann::json out = nlohmann::json::array();
      for (const auto& item : node) out.push_back(canonical(item));
      return out;
    }
    case YAML::NodeType::Scalar: return node.Scalar();
    default: return nullptr;
  }
}

class Reader {
 public:
  explicit Reader(std::filesystem::path base_dir) : base_dir_(std::move(base_dir)) {}

  [[noreturn]] static void fail(const YAML::Node& at, const std::string& what) {
    throw ScenarioFileError(line_of(at), what);
  }

  static void only_keys(const YAML::Node& map, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!map.IsMap()) fail(map, where + " must be a mapping");
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      bool ok = false;
      for (const char* a : allowed) ok = ok || key == a;
      if (!ok) fail(kv.first, "unknown key '" + key + "' in " + where);
    }
  }

  static YAML::Node require(const YAML::Node& map, const char* key, const std::string& where) {
    auto v = map[key];
    if (!v) fail(map, "missing '" + std::string(key) + "' in " + where);
    return v;
  }

  static double number(const YAML::Node& node, const std::string& what) {
    if (!node.IsScalar()) fail(node, what + " must be a number");
    double v = 0.0;
    if (!YAML::convert<double>::decode(node, v)) fail(node, what + " must be a number, got '" + node.Scalar() + "'");
    return v;
  }

  static std::uint64_t count(const YAML::Node& node, const std::string& what) {
    if (!node.IsScalar()) fail(node, what + " must be a non-negative integer");
    const std::string& text = node.Scalar();
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos)
      fail(node, what + " must be a non-negative integer, got '" + text + "'");
    try {
      return std::stoull(text);
    } catch (const std::exception&) {
      fail(node, what + " is out of range");
    }
  }

  static bool boolean(const YAML::Node& node, const std::string& what) {
    bool v = false;
    if (!node.IsScalar() || !YAML::convert<bool>::decode(node, v)) fail(node, what + " must be true or false");
    return v;
  }

  static std::string text(const YAML::Node& node, const std::string& what) {
    if (!node.IsScalar()) fail(node, what + " must be a string");
    return node.Scalar();
  }

  static std::vector<double> numbers(const YAML::Node& node, const std::string& what) {
    if (!node.IsSequence()) fail(node, what + " must be a list of numbers");
    std::vector<double> out;
    for (const auto& item : node) out.push_back(number(item, what + " entry"));
    return out;
  }

  Graph graph(const YAML::Node& node) const {
    only_keys(node, {"generator", "n", "lambda", "k", "edges", "path"}, "graph");
    try {
      if (node["generator"]) {
        GeneratorSpec spec;
        spec.name = text(node["generator"], "graph.generator");
        if (node["n"]) spec.n = count(node["n"], "graph.n");
        if (node["lambda"]) spec.lambda = count(node["lambda"], "graph.lambda");
        if (node["k"]) spec.k = count(node["k"], "graph.k");
        return make_generated_graph(spec);
      }
      if (node["path"]) {
        auto path = std::filesystem::path(text(node["path"], "graph.path"));
        if (path.is_relative()) path = base_dir_ / path;
        return load_edge_list(path);
      }
      if (node["edges"]) {
        const auto n = count(require(node, "n", "graph"), "graph.n");
        const auto& list = node["edges"];
        if (!list.IsSequence()) fail(list, "graph.edges must be a list of [i, j] pairs");
        std::vector<std::pair<NodeId, NodeId>> edges;
        for (const auto& e : list) {
          if (!e.IsSequence() || e.size() != 2) fail(e, "each edge must be a pair [i, j]");
          edges.emplace_back(count(e[0], "edge endpoint"), count(e[1], "edge endpoint"));
        }
        return Graph(n, edges);
      }
    } catch (const GraphError& e) {
      fail(node, e.what());
    }
    fail(node, "graph needs one of 'generator', 'edges' or 'path'");
  }

  static ValueTransform transform(const YAML::Node& node, const std::string& where) {
    const auto name = text(require(node, "transform", where), where + ".transform");
    if (name == "bias") return Bias{number(require(node, "value", where), "bias value")};
    if (name == "scale") return Scale{number(require(node, "value", where), "scale value")};
    if (name == "constant") return ConstantValue{number(require(node, "value", where), "constant value")};
    if (name == "noise") return Noise{number(require(node, "sigma", where), "noise sigma")};
    fail(node["transform"], "unknown transform '" + name + "' (expected bias, scale, constant, noise)");
  }

  static AttackSpec attack(const YAML::Node& node) {
    const std::string where = "attack";
    if (!node.IsMap()) fail(node, "each attack must be a mapping");
    AttackSpec spec;
    spec.node = count(require(node, "node", where), "attack.node");
    const auto kind = text(require(node, "kind", where), "attack.kind");
    if (kind == "acquisition") {
      only_keys(node, {"node", "kind", "transform", "value", "sigma"}, where);
      spec.attack = AcquisitionAttack{transform(node, where)};
    } else if (kind == "transmission") {
      only_keys(node, {"node", "kind", "transform", "value", "sigma"}, where);
      spec.attack = TransmissionAttack{transform(node, where)};
    } else if (kind == "control") {
      only_keys(node, {"node", "kind", "signal", "amplitude", "frequency", "value", "period", "level"}, where);
      const auto signal = text(require(node, "signal", where), "attack.signal");
      if (signal == "sinusoid") {
        spec.attack = ControlAttack{Sinusoid{number(require(node, "amplitude", where), "amplitude"),
                                             number(require(node, "frequency", where), "frequency")}};
      } else if (signal == "constant") {
        spec.attack = ControlAttack{ConstantSignal{number(require(node, "value", where), "value")}};
      } else if (signal == "bang_bang") {
        spec.attack = ControlAttack{BangBang{number(require(node, "period", where), "period"),
                                             number(require(node, "level", where), "level")}};
      } else {
        fail(node["signal"], "unknown signal '" + signal + "' (expected sinusoid, constant, bang_bang)");
      }
    } else if (kind == "timing") {
      only_keys(node, {"node", "kind", "delta"}, where);
      const auto delta = require(node, "delta", where);
      if (delta.IsScalar() && delta.Scalar() == "never") {
        spec.attack = TimingAttack{NeverPoll{}};
      } else {
        spec.attack = TimingAttack{FixedInterval{number(delta, "timing delta")}};
      }
    } else {
      fail(node["kind"], "unknown attack kind '" + kind + "' (expected acquisition, transmission, control, timing)");
    }
    return spec;
  }

 private:
  std::filesystem::path base_dir_;
};

inline std::optional<UniformRange> parse_uniform(const std::string& text, bool allow_t_init) {
  static const std::regex pattern(R"(\s*uniform\s*\[\s*([^,\s]+)\s*,\s*([^\]\s]+)\s*\]\s*)");
  std::smatch m;
  if (!std::regex_match(text, m, pattern)) return std::nullopt;
  try {
    UniformRange r;
    r.lo = std::stod(m[1].str());
    if (allow_t_init && m[2].str() == "t_init") {
      r.hi = std::numeric_limits<double>::quiet_NaN();
    } else {
      r.hi = std::stod(m[2].str());
    }
    return r;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace detail

inline ScenarioFile parse_scenario_file(const std::string& document, const std::filesystem::path& base_dir = ".") {
  using detail::Reader;
  YAML::Node root;
  try {
    root = YAML::Load(document);
  } catch (const YAML::Exception& e) {
    throw ScenarioFileError(e.mark.line >= 0 ? static_cast<std::size_t>(e.mark.line) + 1 : 0, e.msg);
  }
  if (!root.IsMap()) throw ScenarioFileError(1, "scenario file must be a mapping of sections");
  Reader::only_keys(root, {"graph", "params", "nodes", "activation", "attacks", "run"}, "scenario");

  Reader reader(base_dir);
  ScenarioFile file;
  for (const auto& kv : root) file.section_lines[kv.first.as<std::string>()] = detail::line_of(kv.first);

  file.graph = reader.graph(Reader::require(root, "graph", "scenario"));

  const auto params = Reader::require(root, "params", "scenario");
  Reader::only_keys(params, {"epsilon", "F", "theta", "delta_min"}, "params");
  file.epsilon = Reader::number(Reader::require(params, "epsilon", "params"), "epsilon");
  if (!(file.epsilon > 0.0)) Reader::fail(params["epsilon"], "epsilon must be > 0");
  file.F = Reader::count(Reader::require(params, "F", "params"), "F");
  if (params["theta"]) {
    file.theta = Reader::number(params["theta"], "theta");
    if (!(file.theta > 0.0 && file.theta <= 1.0)) Reader::fail(params["theta"], "theta must lie in (0, 1]");
  }
  if (const auto dm = params["delta_min"]) {
    if (dm.IsScalar() && dm.Scalar() == "max") {
      file.delta_min.reset();
    } else {
      file.delta_min = Reader::numbers(dm, "delta_min");
      if (file.delta_min->size() != file.graph.size())
        Reader::fail(dm, "delta_min needs one entry per node (" + std::to_string(file.graph.size()) + ")");
    }
  }

  if (const auto nodes = root["nodes"]) {
    Reader::only_keys(nodes, {"x0"}, "nodes");
    if (const auto x0 = nodes["x0"]) {
      if (x0.IsSequence()) {
        auto list = Reader::numbers(x0, "x0");
        if (list.size() != file.graph.size())
          Reader::fail(x0, "x0 needs one entry per node (" + std::to_string(file.graph.size()) + ")");
        file.x0 = std::move(list);
      } else {
        auto range = detail::parse_uniform(Reader::text(x0, "x0"), false);
        if (!range || !(range->lo <= range->hi)) Reader::fail(x0, "x0 must be a list or 'uniform[a,b]' with a <= b");
        file.x0 = *range;
      }
    }
  }

  if (const auto act = root["activation"]) {
    Reader::only_keys(act, {"t_init", "t0"}, "activation");
    if (act["t_init"]) file.t_init = Reader::number(act["t_init"], "t_init");
    if (!(file.t_init >= 0.0)) Reader::fail(act["t_init"], "t_init must be >= 0");
    if (const auto t0 = act["t0"]) {
      if (t0.IsSequence()) {
        auto list = Reader::numbers(t0, "t0");
        if (list.size() != file.graph.size())
          Reader::fail(t0, "t0 needs one entry per node (" + std::to_string(file.graph.size()) + ")");
        file.t0 = std::move(list);
      } else {
        auto range = detail::parse_uniform(Reader::text(t0, "t0"), true);
        if (!range || range->lo != 0.0 || !std::isnan(range->hi))
          Reader::fail(t0, "t0 must be a list or 'uniform[0,t_init]'");
        file.t0 = UniformActivation{};
      }
    }
  }

  if (const auto attacks = root["attacks"]) {
    if (!attacks.IsSequence() && !attacks.IsNull()) Reader::fail(attacks, "attacks must be a list");
    for (const auto& a : attacks) {
      auto spec = Reader::attack(a);
      if (spec.node >= file.graph.size()) Reader::fail(a["node"], "attack node outside the graph");
      file.attacks.push_back(std::move(spec));
    }
  }

  if (const auto run = root["run"]) {
    Reader::only_keys(run, {"t_end", "seed", "output_dt", "max_events", "allow_excess_attackers"}, "run");
    if (run["t_end"]) file.t_end = Reader::number(run["t_end"], "t_end");
    if (!(file.t_end >= 0.0)) Reader::fail(run["t_end"], "t_end must be >= 0");
    if (run["seed"]) file.seed = Reader::count(run["seed"], "seed");
    if (run["output_dt"]) file.output_dt = Reader::number(run["output_dt"], "output_dt");
    if (!(file.output_dt > 0.0)) Reader::fail(run["output_dt"], "output_dt must be > 0");
    if (run["max_events"]) file.max_events = Reader::count(run["max_events"], "max_events");
    if (run["allow_excess_attackers"])
      file.allow_excess_attackers = Reader::boolean(run["allow_excess_attackers"], "allow_excess_attackers");
  }

  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(detail::fnv1a(detail::canonical(root).dump())));
  file.digest = hex;
  return file;
}

inline ScenarioFile load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioFileError(0, "cannot read scenario file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario_file(buffer.str(), path.parent_path());
}

// Draws the randomized fields for `seed` and runs full scenario validation.
// Problems found at this stage are anchored to their section's line.
inline Scenario materialize(const ScenarioFile& file, std::uint64_t seed) {
  Scenario s;
  const std::size_t n = file.graph.size();
  s.graph = file.graph;
  s.params.epsilon = file.epsilon;
  s.params.F = file.F;
  s.params.theta = file.theta;
  s.params.delta_min = file.delta_min ? *file.delta_min : ProtocolParams::largest_delta_min(file.graph, file.epsilon);
  if (const auto* r = std::get_if<UniformRange>(&file.x0)) {
    s.x0 = draw_uniform_states(n, seed, r->lo, r->hi);
  } else {
    s.x0 = std::get<std::vector<double>>(file.x0);
  }
  s.t_init = file.t_init;
  if (std::holds_alternative<UniformActivation>(file.t0)) {
    s.t0 = draw_activation_times(n, seed, file.t_init);
  } else {
    s.t0 = std::get<std::vector<double>>(file.t0);
  }
  s.attacks = file.attacks;
  s.t_end = file.t_end;
  s.seed = seed;
  s.output_dt = file.output_dt;
  s.max_events = file.max_events;
  s.allow_excess_attackers = file.allow_excess_attackers;

  auto problems = validation_problems(s);
  if (!problems.empty()) {
    auto section_for = [&](const std::string& p) -> std::string {
      if (p.find("attack") != std::string::npos || p.find("misbehaving") != std::string::npos) return "attacks";
      if (p.find("activation") != std::string::npos || p.find("t_init") != std::string::npos ||
          p.find("t0") != std::string::npos)
        return "activation";
      if (p.find("x0") != std::string::npos) return "nodes";
      if (p.find("t_end") != std::string::npos || p.find("output_dt") != std::string::npos ||
          p.find("max_events") != std::string::npos)
        return "run";
      if (p.find("graph") != std::string::npos) return "graph";
      return "params";
    };
    const std::string first = problems.front();
    const auto it = file.section_lines.find(section_for(first));
    std::string message = first;
    for (std::size_t k = 1; k < problems.size(); ++k) message += "; " + problems[k];
    throw ScenarioFileError(it != file.section_lines.end() ? it->second : 0, message);
  }
  return s;
}

}  // namespace rcsim
