#pragma once

// Reference integrator for cross-checking the event-driven engine: plain
// forward Euler on a fixed grid. With alignment on, every scheduled round
// time, dense output time and t_end is inserted into the grid so control
// switches land exactly; with alignment off, rounds fire at the first grid
// point at or after their scheduled time.
//
// Shares only the round arithmetic (protocol.hpp) and the attack primitives
// with the engine; queueing, state advancement and sampling are separate.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rcsim/adversary.hpp"
#include "rcsim/protocol.hpp"
#include "rcsim/random.hpp"
#include "rcsim/scenario.hpp"
#include "rcsim/trace.hpp"

namespace rcsim {

struct OracleConfig {
  double h = 1e-4;
  bool alignment = true;
};

// Without alignment the grid itself must resolve the shortest poll interval.
inline std::vector<std::string> oracle_config_problems(const Scenario& s, const OracleConfig& config) {
  std::vector<std::string> problems;
  if (!(config.h > 0.0)) problems.push_back("oracle step h must be > 0");
  if (!config.alignment && !s.params.delta_min.empty()) {
    const double floor = *std::min_element(s.params.delta_min.begin(), s.params.delta_min.end()) / 10.0;
    if (config.h > floor) {
      problems.push_back("unaligned oracle step must be <= min delta_min / 10 = " + std::to_string(floor));
    }
  }
  return problems;
}

inline Trace run_fixed_step(const Scenario& scenario, const OracleConfig& config) {
  validate(scenario);
  if (auto problems = oracle_config_problems(scenario, config); !problems.empty()) throw ScenarioError(problems);

  const std::size_t n = scenario.graph.size();
  const auto behaviors = build_behaviors(n, scenario.attacks);

  std::vector<double> x = scenario.x0;
  std::vector<double> u(n, 0.0);
  std::vector<bool> active(n, false);
  std::vector<double> next_time = scenario.t0;
  std::vector<bool> pending_activation(n, true);
  std::vector<RandomStream> acq_rng;
  std::vector<RandomStream> tx_rng;
  for (NodeId i = 0; i < n; ++i) {
    acq_rng.emplace_back(scenario.seed, i, StreamPurpose::AcquisitionNoise);
    tx_rng.emplace_back(scenario.seed, i, StreamPurpose::TransmissionNoise);
  }
  // Transmitted value per node, memoized for the current instant.
  std::vector<double> tx_value(n, 0.0);
  std::vector<double> tx_time(n, std::numeric_limits<double>::quiet_NaN());

  Trace trace;
  trace.n = n;
  trace.t_end = scenario.t_end;
  trace.initial_x = scenario.x0;
  trace.delta_min = scenario.params.delta_min;

  auto slope = [&](NodeId i, double t) {
    if (!active[i]) return 0.0;
    return behaviors[i].control ? evaluate(*behaviors[i].control, t) : u[i];
  };

  auto transmitted = [&](NodeId j, double t) {
    if (!behaviors[j].transmission) return x[j];
    if (!(tx_time[j] == t)) {
      tx_time[j] = t;
      tx_value[j] = apply_transform(*behaviors[j].transmission, x[j], tx_rng[j]);
    }
    return tx_value[j];
  };

  auto round = [&](NodeId i, double t, EventKind kind) {
    std::vector<NeighborSample> samples;
    for (NodeId j : scenario.graph.neighbors(i)) {
      if (!active[j]) {
        samples.push_back({j, 0.0, false});
        continue;
      }
      double z = transmitted(j, t);
      if (behaviors[i].acquisition) z = apply_transform(*behaviors[i].acquisition, z, acq_rng[i]);
      samples.push_back({j, z, true});
    }
    const RoundParams params = scenario.params.at(i);
    const RoundDecision d = normal_round(x[i], samples, params, scenario.graph.degree(i));
    if (!behaviors[i].control) u[i] = static_cast<double>(d.control);
    const double interval = behaviors[i].timing ? timing_override(*behaviors[i].timing, params.delta_min) : d.delta;
    next_time[i] = t + interval;
    trace.events.push_back({t, i, kind, x[i], slope(i, t), d.ave, d.accepted.size(), interval});
    trace.event_states.insert(trace.event_states.end(), x.begin(), x.end());
  };

  // Fires every round due at or before t, earliest scheduled first.
  auto fire_due = [&](double t) {
    for (;;) {
      std::optional<NodeId> who;
      for (NodeId i = 0; i < n; ++i) {
        if (next_time[i] <= t && (!who || next_time[i] < next_time[*who])) who = i;
      }
      if (!who) return;
      const NodeId i = *who;
      const EventKind kind = pending_activation[i] ? EventKind::Activation : EventKind::Update;
      if (pending_activation[i]) {
        pending_activation[i] = false;
        active[i] = true;
      }
      // Rounds fire at the grid time; with alignment that is the scheduled time.
      round(i, t, kind);
    }
  };

  auto record_dense = [&](double t) {
    DenseRow row;
    row.t = t;
    row.x = x;
    for (NodeId i = 0; i < n; ++i) row.u.push_back(slope(i, t));
    trace.dense.push_back(std::move(row));
  };

  const double t_end = scenario.t_end;
  const double dt = scenario.output_dt;
  std::uint64_t dense_index = 0;
  auto dense_time = [&] { return static_cast<double>(dense_index) * dt; };

  double t = 0.0;
  fire_due(t);
  while (dense_time() <= t) {
    record_dense(dense_time());
    ++dense_index;
  }
  while (t < t_end) {
    double target = std::min({t + config.h, t_end, dense_time()});
    if (config.alignment) {
      for (NodeId i = 0; i < n; ++i) target = std::min(target, next_time[i]);
    }
    for (NodeId i = 0; i < n; ++i) x[i] += slope(i, t) * (target - t);
    t = target;
    fire_due(t);
    while (dense_time() <= t) {
      record_dense(dense_time());
      ++dense_index;
    }
  }
  if (trace.dense.back().t < t_end) record_dense(t_end);
  return trace;
}

}  // namespace rcsim
