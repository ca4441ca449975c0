#pragma once

// Simulation output: one row per round plus dense samples every output_dt.
// Event rows also keep the full network state right after the round (in
// memory only) so checks can sweep every breakpoint of the piecewise-affine
// trajectories.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <system_error>
#include <vector>

#include "rcsim/graph.hpp"

namespace rcsim {

enum class EventKind { Activation, Update };

inline const char* to_string(EventKind kind) { return kind == EventKind::Activation ? "activation" : "update"; }

struct EventRow {
  double t = 0.0;
  NodeId node = 0;
  EventKind kind = EventKind::Update;
  double x = 0.0;
  double u = 0.0;
  double ave = 0.0;
  std::size_t accepted = 0;
  double delta = 0.0;  // infinity when the node never polls again
  friend bool operator==(const EventRow&, const EventRow&) = default;
};

struct DenseRow {
  double t = 0.0;
  std::vector<double> x;
  std::vector<double> u;
  friend bool operator==(const DenseRow&, const DenseRow&) = default;
};

struct Trace {
  std::size_t n = 0;
  double t_end = 0.0;
  std::vector<double> initial_x;
  std::vector<double> delta_min;
  std::vector<EventRow> events;
  std::vector<double> event_states;  // n entries per event row
  std::vector<DenseRow> dense;
  std::vector<std::string> warnings;

  std::span<const double> state_after(std::size_t event_index) const {
    return std::span<const double>(event_states).subspan(event_index * n, n);
  }

  std::vector<std::size_t> event_counts() const {
    std::vector<std::size_t> counts(n, 0);
    for (const auto& e : events) ++counts[e.node];
    return counts;
  }

  // Per-node event times, in order.
  std::vector<std::vector<double>> event_times() const {
    std::vector<std::vector<double>> out(n);
    for (const auto& e : events) out[e.node].push_back(e.t);
    return out;
  }
};

// Visits every recorded network state in time order: event snapshots and
// dense rows merged, events first on equal times.
template <typename Fn>
void for_each_state(const Trace& trace, Fn&& fn) {
  std::size_t e = 0;
  std::size_t d = 0;
  while (e < trace.events.size() || d < trace.dense.size()) {
    const bool take_event =
        e < trace.events.size() && (d >= trace.dense.size() || trace.events[e].t <= trace.dense[d].t);
    if (take_event) {
      fn(trace.events[e].t, trace.state_after(e));
      ++e;
    } else {
      fn(trace.dense[d].t, std::span<const double>(trace.dense[d].x));
      ++d;
    }
  }
}

// Shortest round-trip decimal form; "inf"/"-inf"/"nan" for non-finite values.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

inline void write_events_csv(std::ostream& out, const Trace& trace) {
  out << "t,node,kind,x,u,ave,accepted_count,delta\n";
  for (const auto& e : trace.events) {
    out << format_number(e.t) << ',' << e.node << ',' << to_string(e.kind) << ',' << format_number(e.x) << ','
        << format_number(e.u) << ',' << format_number(e.ave) << ',' << e.accepted << ',' << format_number(e.delta)
        << '\n';
  }
}

inline void write_dense_csv(std::ostream& out, const Trace& trace) {
  out << 't';
  for (std::size_t i = 0; i < trace.n; ++i) out << ",x_" << i;
  for (std::size_t i = 0; i < trace.n; ++i) out << ",u_" << i;
  out << '\n';
  for (const auto& row : trace.dense) {
    out << format_number(row.t);
    for (double v : row.x) out << ',' << format_number(v);
    for (double v : row.u) out << ',' << format_number(v);
    out << '\n';
  }
}

}  // namespace rcsim
