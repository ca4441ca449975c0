#pragma once

// One normal node's round: order the polled values, drop up to F extreme
// values on each side of the node's own state, sum the remaining offsets,
// quantize, and choose when to poll next.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rcsim/graph.hpp"

namespace rcsim {

// Parameters seen by one node during a round.
struct RoundParams {
  double epsilon = 0.01;
  std::size_t F = 0;
  double delta_min = 0.0;
  // Position of the chosen interval inside the admissible band; 1 picks the
  // upper bound.
  double theta = 1.0;
};

struct ProtocolParams {
  double epsilon = 0.01;
  std::size_t F = 0;
  double theta = 1.0;
  std::vector<double> delta_min;  // one entry per node

  RoundParams at(NodeId i) const {
    if (i >= delta_min.size()) throw std::out_of_range("no delta_min for node " + std::to_string(i));
    return {epsilon, F, delta_min[i], theta};
  }

  // delta_min_i = epsilon / (4 d_i); isolated nodes use d = 1.
  static std::vector<double> largest_delta_min(const Graph& g, double epsilon) {
    std::vector<double> out(g.size());
    for (NodeId i = 0; i < g.size(); ++i) out[i] = epsilon / (4.0 * static_cast<double>(std::max<std::size_t>(g.degree(i), 1)));
    return out;
  }
};

struct NeighborSample {
  NodeId id = 0;
  double value = 0.0;
  bool active = true;
  friend bool operator==(const NeighborSample&, const NeighborSample&) = default;
};

struct RoundDecision {
  std::vector<NodeId> accepted;  // ascending ids
  double ave = 0.0;
  int control = 0;
  double delta = 0.0;
  friend bool operator==(const RoundDecision&, const RoundDecision&) = default;
};

// Drops inactive samples, then orders by value with ascending id on ties.
inline std::vector<NeighborSample> sort_neighbors(std::span<const NeighborSample> samples) {
  std::vector<NeighborSample> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    if (s.active) out.push_back(s);
  }
  std::sort(out.begin(), out.end(), [](const NeighborSample& a, const NeighborSample& b) {
    if (a.value != b.value) return a.value < b.value;
    return a.id < b.id;
  });
  return out;
}

struct FilterResult {
  std::vector<NeighborSample> kept;  // in sorted order
  std::vector<NeighborSample> removed_low;
  std::vector<NeighborSample> removed_high;
};

// Window semantics: a sample in the first F positions is removed when its
// value is strictly below x_i; a sample in the last F positions is removed
// when strictly above. With fewer than 2F samples the windows overlap and
// each sample is still removed at most once.
inline FilterResult partition_extremes(double x_i, std::span<const NeighborSample> sorted, std::size_t F) {
  FilterResult result;
  const std::size_t m = sorted.size();
  const std::size_t low_end = std::min(F, m);
  const std::size_t high_begin = m > F ? m - F : 0;
  for (std::size_t k = 0; k < m; ++k) {
    const auto& s = sorted[k];
    if (k < low_end && s.value < x_i) {
      result.removed_low.push_back(s);
    } else if (k >= high_begin && s.value > x_i) {
      result.removed_high.push_back(s);
    } else {
      result.kept.push_back(s);
    }
  }
  return result;
}

inline std::vector<NodeId> filter_extremes(double x_i, std::span<const NeighborSample> sorted, std::size_t F) {
  std::vector<NodeId> ids;
  for (const auto& s : partition_extremes(x_i, sorted, F).kept) ids.push_back(s.id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

// Sum of offsets to the node's own state; exactly 0 for an empty set.
inline double ave(double x_i, std::span<const NeighborSample> accepted) {
  double sum = 0.0;
  for (const auto& s : accepted) sum += s.value - x_i;
  return sum;
}

inline int sign_eps(double chi, double epsilon) {
  if (std::abs(chi) < epsilon) return 0;
  return chi > 0.0 ? 1 : -1;
}

// Upper end of the admissible inter-poll band: max(eps, |ave|) / (4 d).
inline double schedule_upper_bound(double ave_value, double epsilon, std::size_t degree) {
  const double d = static_cast<double>(std::max<std::size_t>(degree, 1));
  return std::max(epsilon, std::abs(ave_value)) / (4.0 * d);
}

inline double schedule_next(double ave_value, const RoundParams& params, std::size_t degree) {
  return std::max(params.delta_min, params.theta * schedule_upper_bound(ave_value, params.epsilon, degree));
}

inline RoundDecision normal_round(double x_i, std::span<const NeighborSample> samples, const RoundParams& params,
                                  std::size_t degree) {
  const auto sorted = sort_neighbors(samples);
  const auto filtered = partition_extremes(x_i, sorted, params.F);

  RoundDecision decision;
  decision.ave = ave(x_i, filtered.kept);
  decision.control = sign_eps(decision.ave, params.epsilon);
  decision.delta = schedule_next(decision.ave, params, degree);
  for (const auto& s : filtered.kept) decision.accepted.push_back(s.id);
  std::sort(decision.accepted.begin(), decision.accepted.end());
  return decision;
}

}  // namespace rcsim
