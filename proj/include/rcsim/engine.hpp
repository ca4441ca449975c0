#pragma once

// Event-driven continuous-time simulation. Between rounds every normal node
// moves with a held slope in {-1, 0, 1} and control attackers follow the
// closed-form integral of their signal, so states are advanced exactly; the
// only events are node activations and self-scheduled polls.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rcsim/adversary.hpp"
#include "rcsim/protocol.hpp"
#include "rcsim/random.hpp"
#include "rcsim/scenario.hpp"
#include "rcsim/trace.hpp"

namespace rcsim {

struct NodeRuntime {
  double x = 0.0;
  double u_held = 0.0;
  bool active = false;
  double next_event = kNever;
  double last_advanced = 0.0;
};

struct Event {
  double time = 0.0;
  NodeId node = 0;
  EventKind kind = EventKind::Update;

  // Min-heap order on (time, node).
  friend bool operator>(const Event& a, const Event& b) {
    if (a.time != b.time) return a.time > b.time;
    return a.node > b.node;
  }
};

class EventBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Engine {
 public:
  explicit Engine(Scenario scenario) : scenario_(std::move(scenario)) {
    validate(scenario_);
    const std::size_t n = scenario_.graph.size();
    behaviors_ = build_behaviors(n, scenario_.attacks);
    nodes_.resize(n);
    acquisition_rng_.reserve(n);
    transmission_rng_.reserve(n);
    for (NodeId i = 0; i < n; ++i) {
      nodes_[i].x = scenario_.x0[i];
      nodes_[i].next_event = scenario_.t0[i];
      queue_.push({scenario_.t0[i], i, EventKind::Activation});
      acquisition_rng_.emplace_back(scenario_.seed, i, StreamPurpose::AcquisitionNoise);
      transmission_rng_.emplace_back(scenario_.seed, i, StreamPurpose::TransmissionNoise);
    }
    emit_cache_.assign(n, {std::nullopt, 0.0});
    event_counts_.assign(n, 0);

    trace_.n = n;
    trace_.t_end = scenario_.t_end;
    trace_.initial_x = scenario_.x0;
    trace_.delta_min = scenario_.params.delta_min;
    for (NodeId i = 0; i < n; ++i) {
      if (scenario_.graph.degree(i) == 0) {
        trace_.warnings.push_back("node " + std::to_string(i) + " is isolated; scheduling uses degree 1");
      }
    }
  }

  const Scenario& scenario() const { return scenario_; }
  const NodeRuntime& node(NodeId i) const { return nodes_.at(i); }
  double now() const { return now_; }
  bool idle() const { return queue_.empty(); }
  std::optional<Event> peek() const {
    if (queue_.empty()) return std::nullopt;
    return queue_.top();
  }

  // Pending events in processing order.
  std::vector<Event> pending() const {
    auto copy = queue_;
    std::vector<Event> out;
    while (!copy.empty()) {
      out.push_back(copy.top());
      copy.pop();
    }
    return out;
  }

  const Trace& trace() const { return trace_; }

  void advance_to(double t) {
    if (t < now_) throw std::logic_error("advance_to cannot move backwards in time");
    if (t == now_) return;
    for (NodeId i = 0; i < nodes_.size(); ++i) {
      auto& node = nodes_[i];
      if (node.active) {
        if (behaviors_[i].control) {
          node.x += integral(*behaviors_[i].control, node.last_advanced, t);
        } else {
          node.x += node.u_held * (t - node.last_advanced);
        }
      }
      node.last_advanced = t;
    }
    now_ = t;
  }

  // Processes the earliest pending event. Returns false when nothing is queued.
  bool step() {
    if (queue_.empty()) return false;
    const Event event = queue_.top();
    queue_.pop();
    advance_to(event.time);

    const NodeId i = event.node;
    if (++event_counts_[i], ++total_events_ > scenario_.max_events) {
      const auto densest = static_cast<NodeId>(
          std::max_element(event_counts_.begin(), event_counts_.end()) - event_counts_.begin());
      throw EventBudgetExceeded("event budget of " + std::to_string(scenario_.max_events) +
                                " exceeded; densest node is " + std::to_string(densest) + " with " +
                                std::to_string(event_counts_[densest]) + " events");
    }
    if (event.kind == EventKind::Activation) nodes_[i].active = true;
    run_round(i, event);
    return true;
  }

  Trace run() {
    const double t_end = scenario_.t_end;
    const double dt = scenario_.output_dt;
    std::uint64_t dense_index = 0;
    auto dense_time = [&] { return static_cast<double>(dense_index) * dt; };

    while (!queue_.empty() && queue_.top().time <= t_end) {
      const double next = queue_.top().time;
      while (dense_time() < next) {
        record_dense(dense_time());
        ++dense_index;
      }
      step();
    }
    while (dense_time() <= t_end) {
      record_dense(dense_time());
      ++dense_index;
    }
    if (trace_.dense.empty() || trace_.dense.back().t < t_end) record_dense(t_end);
    advance_to(t_end);
    return trace_;
  }

 private:
  double emitted(NodeId j) {
    const auto& tr = behaviors_[j].transmission;
    if (!tr) return nodes_[j].x;
    auto& [when, value] = emit_cache_[j];
    if (!when || *when != now_) {
      when = now_;
      value = apply_transform(*tr, nodes_[j].x, transmission_rng_[j]);
    }
    return value;
  }

  double control_value(NodeId i) const {
    if (behaviors_[i].control) return nodes_[i].active ? evaluate(*behaviors_[i].control, now_) : 0.0;
    return nodes_[i].u_held;
  }

  void run_round(NodeId i, const Event& event) {
    const auto& behavior = behaviors_[i];
    const auto& neighbors = scenario_.graph.neighbors(i);

    samples_.clear();
    for (NodeId j : neighbors) {
      if (!nodes_[j].active) {
        samples_.push_back({j, 0.0, false});
        continue;
      }
      double z = emitted(j);
      if (behavior.acquisition) z = apply_transform(*behavior.acquisition, z, acquisition_rng_[i]);
      samples_.push_back({j, z, true});
    }

    const RoundParams params = scenario_.params.at(i);
    const RoundDecision decision = normal_round(nodes_[i].x, samples_, params, neighbors.size());

    if (!behavior.control) nodes_[i].u_held = static_cast<double>(decision.control);

    const double interval = behavior.timing ? timing_override(*behavior.timing, params.delta_min) : decision.delta;
    nodes_[i].next_event = event.time + interval;
    if (std::isfinite(nodes_[i].next_event)) queue_.push({nodes_[i].next_event, i, EventKind::Update});

    trace_.events.push_back({event.time, i, event.kind, nodes_[i].x, control_value(i), decision.ave,
                             decision.accepted.size(), interval});
    for (const auto& node : nodes_) trace_.event_states.push_back(node.x);
  }

  void record_dense(double t) {
    advance_to(t);
    DenseRow row;
    row.t = t;
    row.x.reserve(nodes_.size());
    row.u.reserve(nodes_.size());
    for (NodeId i = 0; i < nodes_.size(); ++i) {
      row.x.push_back(nodes_[i].x);
      row.u.push_back(control_value(i));
    }
    trace_.dense.push_back(std::move(row));
  }

  Scenario scenario_;
  std::vector<NodeBehavior> behaviors_;
  std::vector<NodeRuntime> nodes_;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
  std::vector<RandomStream> acquisition_rng_;
  std::vector<RandomStream> transmission_rng_;
  std::vector<std::pair<std::optional<double>, double>> emit_cache_;
  std::vector<std::uint64_t> event_counts_;
  std::uint64_t total_events_ = 0;
  std::vector<NeighborSample> samples_;
  double now_ = 0.0;
  Trace trace_;
};

inline Trace run(const Scenario& scenario) { return Engine(scenario).run(); }

}  // namespace rcsim
