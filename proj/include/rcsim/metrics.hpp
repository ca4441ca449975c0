#pragma once

// Verdicts computed from a finished trace. Every check is a pure function of
// the trace and the set of normal nodes (known to the evaluator only).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <set>
#include <vector>

#include "rcsim/adversary.hpp"
#include "rcsim/scenario.hpp"
#include "rcsim/trace.hpp"

namespace rcsim {

inline constexpr double kStateSlack = 1e-9;
inline constexpr double kTimeSlack = 1e-12;

struct NormalSet {
  std::vector<NodeId> nodes;  // ascending

  static NormalSet all(std::size_t n) {
    NormalSet s;
    for (NodeId i = 0; i < n; ++i) s.nodes.push_back(i);
    return s;
  }

  static NormalSet excluding(std::size_t n, const std::vector<AttackSpec>& attacks) {
    const auto bad = misbehaving_nodes(attacks);
    NormalSet s;
    for (NodeId i = 0; i < n; ++i) {
      if (!bad.count(i)) s.nodes.push_back(i);
    }
    return s;
  }

  static NormalSet of(const Scenario& scenario) { return excluding(scenario.graph.size(), scenario.attacks); }
};

struct HullViolation {
  double t = 0.0;
  NodeId node = 0;
  double x = 0.0;
  friend bool operator==(const HullViolation&, const HullViolation&) = default;
};

struct HullResult {
  bool ok = true;
  std::optional<HullViolation> first_violation;
};

inline HullResult hull_check(const Trace& trace, const NormalSet& normal, double tol = kStateSlack) {
  HullResult result;
  if (normal.nodes.empty()) return result;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (NodeId i : normal.nodes) {
    lo = std::min(lo, trace.initial_x[i]);
    hi = std::max(hi, trace.initial_x[i]);
  }
  for_each_state(trace, [&](double t, std::span<const double> x) {
    if (!result.ok) return;
    for (NodeId i : normal.nodes) {
      if (x[i] < lo - tol || x[i] > hi + tol) {
        result.ok = false;
        result.first_violation = HullViolation{t, i, x[i]};
        return;
      }
    }
  });
  return result;
}

// Running min over normal nodes never falls and running max never rises,
// each compared against its best value so far.
inline bool monotonicity_check(const Trace& trace, const NormalSet& normal, double slack = kStateSlack) {
  if (normal.nodes.empty()) return true;
  double best_min = -std::numeric_limits<double>::infinity();
  double best_max = std::numeric_limits<double>::infinity();
  bool ok = true;
  for_each_state(trace, [&](double, std::span<const double> x) {
    double mn = std::numeric_limits<double>::infinity();
    double mx = -mn;
    for (NodeId i : normal.nodes) {
      mn = std::min(mn, x[i]);
      mx = std::max(mx, x[i]);
    }
    if (mn < best_min - slack || mx > best_max + slack) ok = false;
    best_min = std::max(best_min, mn);
    best_max = std::min(best_max, mx);
  });
  return ok;
}

inline double normal_diameter(std::span<const double> x, const NormalSet& normal) {
  if (normal.nodes.empty()) return 0.0;
  double mn = std::numeric_limits<double>::infinity();
  double mx = -mn;
  for (NodeId i : normal.nodes) {
    mn = std::min(mn, x[i]);
    mx = std::max(mx, x[i]);
  }
  return mx - mn;
}

struct ConvergenceResult {
  double diameter_final = 0.0;
  std::optional<double> t_conv;  // earliest time after which every row stays below the threshold
};

inline ConvergenceResult convergence(const Trace& trace, const NormalSet& normal, double threshold) {
  std::vector<std::pair<double, double>> series;  // (t, diameter)
  for_each_state(trace, [&](double t, std::span<const double> x) { series.emplace_back(t, normal_diameter(x, normal)); });

  ConvergenceResult result;
  if (series.empty()) return result;
  result.diameter_final = series.back().second;
  std::optional<double> t_conv;
  for (auto it = series.rbegin(); it != series.rend(); ++it) {
    if (!(it->second < threshold)) break;
    t_conv = it->first;
  }
  result.t_conv = t_conv;
  return result;
}

// Consecutive rounds of every node are at least delta_min apart.
inline bool zeno_check(const Trace& trace, double slack = kTimeSlack) {
  std::vector<std::optional<double>> last(trace.n);
  for (const auto& e : trace.events) {
    if (last[e.node] && e.t - *last[e.node] < trace.delta_min[e.node] - slack) return false;
    last[e.node] = e.t;
  }
  return true;
}

struct SettleWitnesses {
  NodeId low = 0;   // settles on the final minimum
  NodeId high = 0;  // settles on the final maximum
  // Earliest time from which both witnesses stay at their final values.
  double settle_time = 0.0;
  friend bool operator==(const SettleWitnesses&, const SettleWitnesses&) = default;
};

// Looks for normal nodes holding still over the last 20% of the horizon at
// the final normal minimum and maximum. Empty when the horizon ends before
// such nodes exist.
inline std::optional<SettleWitnesses> settle_check(const Trace& trace, const NormalSet& normal,
                                                   double tol = kStateSlack) {
  if (normal.nodes.empty()) return std::nullopt;
  const double window_start = 0.8 * trace.t_end;

  std::vector<std::pair<double, std::vector<double>>> rows;
  for_each_state(trace, [&](double t, std::span<const double> x) { rows.emplace_back(t, std::vector<double>(x.begin(), x.end())); });
  if (rows.empty()) return std::nullopt;
  const auto& final_x = rows.back().second;

  double final_min = std::numeric_limits<double>::infinity();
  double final_max = -final_min;
  for (NodeId i : normal.nodes) {
    final_min = std::min(final_min, final_x[i]);
    final_max = std::max(final_max, final_x[i]);
  }

  // Earliest row time from which node i stays within tol of its final value.
  auto settled_since = [&](NodeId i) {
    double since = rows.back().first;
    for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
      if (std::abs(it->second[i] - final_x[i]) > tol) break;
      since = it->first;
    }
    return since;
  };

  std::optional<NodeId> low;
  std::optional<NodeId> high;
  for (NodeId i : normal.nodes) {
    if (settled_since(i) > window_start) continue;
    if (!low && std::abs(final_x[i] - final_min) <= tol) low = i;
    if (!high && std::abs(final_x[i] - final_max) <= tol) high = i;
  }
  if (!low || !high) return std::nullopt;
  return SettleWitnesses{*low, *high, std::max(settled_since(*low), settled_since(*high))};
}

enum class Lemma3Status { Pass, Fail, NotApplicable };

inline const char* to_string(Lemma3Status s) {
  switch (s) {
    case Lemma3Status::Pass: return "pass";
    case Lemma3Status::Fail: return "fail";
    case Lemma3Status::NotApplicable: return "not_applicable";
  }
  return "?";
}

inline bool only_acquisition_or_timing(const std::vector<AttackSpec>& attacks) {
  return std::all_of(attacks.begin(), attacks.end(), [](const AttackSpec& a) {
    return a.kind() == AttackKind::Acquisition || a.kind() == AttackKind::Timing;
  });
}

// Once the extreme witnesses have settled (observed time T'), every round
// they run from T' + eps/4 on must see |ave| < 3 eps / 2.
inline Lemma3Status lemma3_check(const Trace& trace, const NormalSet& normal, double epsilon,
                                 const std::vector<AttackSpec>& attacks) {
  if (!only_acquisition_or_timing(attacks)) return Lemma3Status::NotApplicable;
  const auto witnesses = settle_check(trace, normal);
  if (!witnesses) return Lemma3Status::Fail;
  const double from = witnesses->settle_time + epsilon / 4.0;
  for (const auto& e : trace.events) {
    if (e.t < from || (e.node != witnesses->low && e.node != witnesses->high)) continue;
    if (!(std::abs(e.ave) < 1.5 * epsilon + kStateSlack)) return Lemma3Status::Fail;
  }
  return Lemma3Status::Pass;
}

struct Verdict {
  bool hull_ok = true;
  std::optional<HullViolation> hull_violation;
  bool monotone_ok = true;
  double diameter_final = 0.0;
  std::optional<double> t_conv;
  double threshold = 0.0;
  bool zeno_ok = true;
  std::optional<SettleWitnesses> settle_witnesses;
  Lemma3Status lemma3 = Lemma3Status::NotApplicable;

  // The finite-horizon reading of approximate consensus at 3 eps.
  bool consensus_ok() const { return hull_ok && t_conv.has_value() && diameter_final < threshold; }
};

inline Verdict evaluate(const Trace& trace, const Scenario& scenario) {
  const NormalSet normal = NormalSet::of(scenario);
  const double threshold = 3.0 * scenario.params.epsilon;
  Verdict v;
  const auto hull = hull_check(trace, normal);
  v.hull_ok = hull.ok;
  v.hull_violation = hull.first_violation;
  v.monotone_ok = monotonicity_check(trace, normal);
  const auto conv = convergence(trace, normal, threshold);
  v.diameter_final = conv.diameter_final;
  v.t_conv = conv.t_conv;
  v.threshold = threshold;
  v.zeno_ok = zeno_check(trace);
  v.settle_witnesses = settle_check(trace, normal);
  v.lemma3 = lemma3_check(trace, normal, scenario.params.epsilon, scenario.attacks);
  return v;
}

}  // namespace rcsim
