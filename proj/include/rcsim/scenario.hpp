#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "rcsim/adversary.hpp"
#include "rcsim/graph.hpp"
#include "rcsim/protocol.hpp"
#include "rcsim/random.hpp"

namespace rcsim {

struct Scenario {
  Graph graph;
  ProtocolParams params;
  std::vector<double> x0;
  std::vector<double> t0;  // activation times; the earliest must be 0
  double t_init = 0.0;
  std::vector<AttackSpec> attacks;
  double t_end = 1.0;
  std::uint64_t seed = 0;
  double output_dt = 0.01;
  // Stress runs may exceed the misbehavior budget on purpose.
  bool allow_excess_attackers = false;
  std::uint64_t max_events = 100'000'000;
};

class ScenarioError : public std::invalid_argument {
 public:
  explicit ScenarioError(std::vector<std::string> problems)
      : std::invalid_argument(join(problems)), problems_(std::move(problems)) {}

  const std::vector<std::string>& problems() const { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& problems) {
    std::string out = "invalid scenario:";
    for (const auto& p : problems) out += "\n  - " + p;
    return out;
  }
  std::vector<std::string> problems_;
};

inline std::vector<std::string> validation_problems(const Scenario& s) {
  std::vector<std::string> problems;
  const std::size_t n = s.graph.size();
  auto add = [&problems](std::string p) { problems.push_back(std::move(p)); };

  if (n == 0) add("graph has no nodes");
  if (!(s.params.epsilon > 0.0) || !std::isfinite(s.params.epsilon)) add("epsilon must be > 0");
  if (!(s.params.theta > 0.0 && s.params.theta <= 1.0)) add("theta must lie in (0, 1]");
  if (s.x0.size() != n) add("x0 has " + std::to_string(s.x0.size()) + " entries for " + std::to_string(n) + " nodes");
  if (s.t0.size() != n) add("t0 has " + std::to_string(s.t0.size()) + " entries for " + std::to_string(n) + " nodes");
  if (s.params.delta_min.size() != n) {
    add("delta_min has " + std::to_string(s.params.delta_min.size()) + " entries for " + std::to_string(n) + " nodes");
  }
  for (double v : s.x0) {
    if (!std::isfinite(v)) {
      add("x0 contains a non-finite value");
      break;
    }
  }
  if (!(s.t_init >= 0.0)) add("t_init must be >= 0");
  if (s.t0.size() == n && n > 0) {
    const double earliest = *std::min_element(s.t0.begin(), s.t0.end());
    if (earliest != 0.0) add("earliest activation time must be 0 (got " + std::to_string(earliest) + ")");
    for (NodeId i = 0; i < n; ++i) {
      if (!(s.t0[i] >= 0.0 && s.t0[i] <= s.t_init)) {
        add("activation time of node " + std::to_string(i) + " lies outside [0, t_init]");
      }
    }
  }
  if (s.params.delta_min.size() == n && s.params.epsilon > 0.0) {
    for (NodeId i = 0; i < n; ++i) {
      const double d = static_cast<double>(std::max<std::size_t>(s.graph.degree(i), 1));
      const double cap = s.params.epsilon / (4.0 * d);
      const double dm = s.params.delta_min[i];
      if (!(dm > 0.0) || dm > cap) {
        add("delta_min of node " + std::to_string(i) + " must lie in (0, epsilon/(4 d)] = (0, " + std::to_string(cap) +
            "]");
      }
    }
  }
  if (!(s.t_end >= 0.0) || !std::isfinite(s.t_end)) add("t_end must be finite and >= 0");
  if (!(s.output_dt > 0.0)) add("output_dt must be > 0");
  if (s.max_events == 0) add("max_events must be >= 1");

  const std::vector<double> dm = s.params.delta_min.size() == n ? s.params.delta_min : std::vector<double>(n, 0.0);
  for (auto& p : validate_attacks(s.attacks, n, s.params.F, dm, s.allow_excess_attackers)) add(std::move(p));
  return problems;
}

inline void validate(const Scenario& s) {
  auto problems = validation_problems(s);
  if (!problems.empty()) throw ScenarioError(std::move(problems));
}

// Independent uniform draw per node from the (seed, node) substream.
inline std::vector<double> draw_uniform_states(std::size_t n, std::uint64_t seed, double lo, double hi) {
  std::vector<double> out(n);
  for (NodeId i = 0; i < n; ++i) {
    RandomStream rng(seed, i, StreamPurpose::InitialState);
    out[i] = rng.uniform(lo, hi);
  }
  return out;
}

// Uniform draws on [0, t_init], shifted so the earliest node activates at 0.
inline std::vector<double> draw_activation_times(std::size_t n, std::uint64_t seed, double t_init) {
  std::vector<double> out(n);
  for (NodeId i = 0; i < n; ++i) {
    RandomStream rng(seed, i, StreamPurpose::Activation);
    out[i] = rng.uniform(0.0, t_init);
  }
  if (n > 0) {
    const double earliest = *std::min_element(out.begin(), out.end());
    for (double& t : out) t -= earliest;
  }
  return out;
}

// Randomized defaults: x0 ~ U[0,1], activation ~ U[0, t_init], and the
// largest admissible delta_min for every node.
inline Scenario make_scenario(Graph graph, double epsilon, std::size_t F, double t_init, double t_end,
                              std::uint64_t seed, std::vector<AttackSpec> attacks = {}) {
  Scenario s;
  const std::size_t n = graph.size();
  s.params.epsilon = epsilon;
  s.params.F = F;
  s.params.delta_min = ProtocolParams::largest_delta_min(graph, epsilon);
  s.graph = std::move(graph);
  s.x0 = draw_uniform_states(n, seed, 0.0, 1.0);
  s.t_init = t_init;
  s.t0 = draw_activation_times(n, seed, t_init);
  s.attacks = std::move(attacks);
  s.t_end = t_end;
  s.seed = seed;
  return s;
}

}  // namespace rcsim
