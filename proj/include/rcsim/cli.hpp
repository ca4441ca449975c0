#pragma once

// Command verbs behind the `rcsim` executable. Each returns the process exit
// code: 0 success, 1 verdict or check failure, 2 invalid input, 3 the run
// itself aborted (event budget exceeded).

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "rcsim/engine.hpp"
#include "rcsim/graph.hpp"
#include "rcsim/metrics.hpp"
#include "rcsim/scenario_file.hpp"
#include "rcsim/summary.hpp"

namespace rcsim::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kInvalidInput = 2, kRunAborted = 3 };

inline nlohmann::json to_json(const ConnectivityReport& r) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : r.violating_pairs) pairs.push_back({p.a, p.b, p.common});
  nlohmann::json j;
  j["threshold"] = r.threshold;
  j["min_common"] = r.min_common == std::numeric_limits<std::size_t>::max() ? nlohmann::json(nullptr)
                                                                            : nlohmann::json(r.min_common);
  j["violating_pairs"] = pairs;
  j["satisfied"] = r.satisfied;
  return j;
}

inline std::optional<AssumptionVariant> parse_variant(const std::string& name) {
  if (name == "generic") return AssumptionVariant::Generic;
  if (name == "acq_timing") return AssumptionVariant::AcquisitionTiming;
  return std::nullopt;
}

struct RunResult {
  Summary summary;
  Trace trace;
};

inline RunResult simulate(const ScenarioFile& file, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  const Scenario scenario = materialize(file, seed);
  RunResult result;
  result.trace = run(scenario);
  result.summary.digest = file.digest;
  result.summary.seed = seed;
  result.summary.n = scenario.graph.size();
  result.summary.t_end = scenario.t_end;
  result.summary.verdict = evaluate(result.trace, scenario);
  result.summary.event_counts = result.trace.event_counts();
  result.summary.warnings = result.trace.warnings;
  result.summary.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

inline void write_run_outputs(const std::filesystem::path& dir, const RunResult& result, bool traces) {
  std::filesystem::create_directories(dir);
  if (traces) {
    std::ofstream events(dir / "trace.csv", std::ios::binary);
    write_events_csv(events, result.trace);
    std::ofstream dense(dir / "dense.csv", std::ios::binary);
    write_dense_csv(dense, result.trace);
    if (!events || !dense) throw std::runtime_error("cannot write traces into " + dir.string());
  }
  write_text(dir / "summary.json", to_json(result.summary).dump(2) + "\n");
}

inline int cmd_run(const std::filesystem::path& scenario_path, const std::filesystem::path& out_dir,
                   bool assert_verdicts, std::ostream& out, std::ostream& err) {
  ScenarioFile file;
  RunResult result;
  try {
    file = load_scenario_file(scenario_path);
    result = simulate(file, file.seed);
  } catch (const ScenarioFileError& e) {
    err << scenario_path.string() << ":" << e.what() << "\n";
    return kInvalidInput;
  } catch (const EventBudgetExceeded& e) {
    err << "run aborted: " << e.what() << "\n";
    return kRunAborted;
  }
  write_run_outputs(out_dir, result, true);
  const auto& v = result.summary.verdict;
  out << "seed " << result.summary.seed << ": hull_ok=" << v.hull_ok << " monotone_ok=" << v.monotone_ok
      << " zeno_ok=" << v.zeno_ok << " diameter_final=" << format_number(v.diameter_final)
      << " t_conv=" << (v.t_conv ? format_number(*v.t_conv) : "none") << " lemma3=" << to_string(v.lemma3) << "\n";
  for (const auto& w : result.summary.warnings) err << "warning: " << w << "\n";
  if (assert_verdicts && !verdict_passes(v)) return kCheckFailed;
  return kOk;
}

// RC_THREADS caps batch parallelism; defaults to the hardware concurrency.
inline std::size_t batch_threads() {
  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("RC_THREADS")) {
    try {
      const auto cap = std::stoull(env);
      if (cap >= 1) threads = std::min<std::size_t>(threads, cap);
    } catch (const std::exception&) {
    }
  }
  return threads;
}

struct Spread {
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;
};

inline std::optional<Spread> spread(std::vector<double> values) {
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size();
  const double median = m % 2 == 1 ? values[m / 2] : 0.5 * (values[m / 2 - 1] + values[m / 2]);
  return Spread{values.front(), median, values.back()};
}

inline nlohmann::json to_json(const std::optional<Spread>& s, std::size_t count) {
  if (!s) return {{"count", 0}, {"min", nullptr}, {"median", nullptr}, {"max", nullptr}};
  return {{"count", count}, {"min", s->min}, {"median", s->median}, {"max", s->max}};
}

inline nlohmann::json aggregate(const std::vector<Summary>& runs, const std::string& digest, std::uint64_t base_seed) {
  std::size_t hull = 0, monotone = 0, zeno = 0, converged = 0, consensus = 0, passing = 0;
  std::size_t l3_pass = 0, l3_fail = 0, l3_na = 0;
  std::vector<double> diameters;
  std::vector<double> t_convs;
  for (const auto& s : runs) {
    const auto& v = s.verdict;
    hull += v.hull_ok;
    monotone += v.monotone_ok;
    zeno += v.zeno_ok;
    converged += v.t_conv.has_value();
    consensus += v.consensus_ok();
    passing += verdict_passes(v);
    l3_pass += v.lemma3 == Lemma3Status::Pass;
    l3_fail += v.lemma3 == Lemma3Status::Fail;
    l3_na += v.lemma3 == Lemma3Status::NotApplicable;
    diameters.push_back(v.diameter_final);
    if (v.t_conv) t_convs.push_back(*v.t_conv);
  }
  nlohmann::json j;
  j["digest"] = digest;
  j["base_seed"] = base_seed;
  j["seeds"] = runs.size();
  j["counts"] = {{"hull_ok", hull},           {"monotone_ok", monotone}, {"zeno_ok", zeno},
                 {"converged", converged},    {"consensus_ok", consensus}, {"verdict_pass", passing},
                 {"lemma3_pass", l3_pass},    {"lemma3_fail", l3_fail},  {"lemma3_not_applicable", l3_na}};
  j["diameter_final"] = to_json(spread(diameters), diameters.size());
  j["t_conv"] = to_json(spread(t_convs), t_convs.size());
  return j;
}

// Runs seeds base, base+1, ..., base+seeds-1 of the scenario file.
inline int cmd_batch(const std::filesystem::path& scenario_path, std::size_t seeds,
                     const std::filesystem::path& out_dir, bool assert_verdicts, bool traces, std::ostream& out,
                     std::ostream& err) {
  if (seeds < 1) {
    err << "--seeds must be >= 1\n";
    return kInvalidInput;
  }
  ScenarioFile file;
  try {
    file = load_scenario_file(scenario_path);
    materialize(file, file.seed);
  } catch (const ScenarioFileError& e) {
    err << scenario_path.string() << ":" << e.what() << "\n";
    return kInvalidInput;
  }

  std::vector<Summary> summaries(seeds);
  std::vector<std::string> failures(seeds);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < seeds; k = next++) {
      const std::uint64_t seed = file.seed + k;
      try {
        auto result = simulate(file, seed);
        write_run_outputs(out_dir / ("seed_" + std::to_string(seed)), result, traces);
        summaries[k] = std::move(result.summary);
      } catch (const std::exception& e) {
        failures[k] = e.what();
      }
    }
  };
  const std::size_t threads = std::min(batch_threads(), seeds);
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  for (std::size_t k = 0; k < seeds; ++k) {
    if (!failures[k].empty()) {
      err << "seed " << file.seed + k << " aborted: " << failures[k] << "\n";
      return kRunAborted;
    }
  }
  const auto agg = aggregate(summaries, file.digest, file.seed);
  std::filesystem::create_directories(out_dir);
  write_text(out_dir / "aggregate.json", agg.dump(2) + "\n");
  out << agg.dump() << "\n";
  if (assert_verdicts && agg["counts"]["verdict_pass"].get<std::size_t>() != seeds) return kCheckFailed;
  return kOk;
}

struct GraphSource {
  std::optional<std::filesystem::path> path;
  GeneratorSpec generator;
};

inline int cmd_check_graph(const GraphSource& source, std::size_t F, const std::string& variant_name,
                           std::ostream& out, std::ostream& err) {
  const auto variant = parse_variant(variant_name);
  if (!variant) {
    err << "unknown variant '" << variant_name << "' (expected generic or acq_timing)\n";
    return kInvalidInput;
  }
  Graph g;
  try {
    g = source.path ? load_edge_list(*source.path) : make_generated_graph(source.generator);
  } catch (const GraphError& e) {
    err << e.what() << "\n";
    return kInvalidInput;
  }
  const auto report = check_assumption(g, F, *variant);
  auto j = to_json(report);
  j["n"] = g.size();
  j["edges"] = g.edge_count();
  j["connected"] = g.connected();
  j["F"] = F;
  j["variant"] = variant_name;
  out << j.dump() << "\n";
  return report.satisfied ? kOk : kCheckFailed;
}

inline int cmd_gen_graph(const GeneratorSpec& spec, const std::filesystem::path& out_path, std::ostream& out,
                         std::ostream& err) {
  Graph g;
  try {
    g = make_generated_graph(spec);
  } catch (const GraphError& e) {
    err << e.what() << "\n";
    return kInvalidInput;
  }
  if (out_path.has_parent_path()) std::filesystem::create_directories(out_path.parent_path());
  std::ofstream file(out_path, std::ios::binary);
  if (!file) {
    err << "cannot write " << out_path.string() << "\n";
    return kInvalidInput;
  }
  write_edge_list(file, g);
  out << "wrote " << out_path.string() << ": n=" << g.size() << " edges=" << g.edge_count() << "\n";
  return kOk;
}

}  // namespace rcsim::cli
