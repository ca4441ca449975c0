#pragma once

// Declarative misbehavior. Each AttackSpec corrupts exactly one of the four
// per-round operations of one node: what it perceives, what it broadcasts,
// how it drives its own state, or when it polls. A node may carry several
// specs of different kinds and still counts as a single misbehaving node.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "rcsim/graph.hpp"
#include "rcsim/random.hpp"

namespace rcsim {

enum class AttackKind { Acquisition, Transmission, Control, Timing };

inline const char* to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::Acquisition: return "acquisition";
    case AttackKind::Transmission: return "transmission";
    case AttackKind::Control: return "control";
    case AttackKind::Timing: return "timing";
  }
  return "?";
}

// Value transforms (acquisition: Bias, Scale, Noise; transmission: all four).
struct Bias {
  double offset = 0.0;
};
struct Scale {
  double factor = 1.0;
};
struct ConstantValue {
  double value = 0.0;
};
struct Noise {
  double sigma = 0.0;
};
using ValueTransform = std::variant<Bias, Scale, ConstantValue, Noise>;

// Control signals u(t), all with closed-form antiderivatives.
struct Sinusoid {
  double amplitude = 0.0;
  double frequency = 0.0;  // Hz: u(t) = A sin(2 pi f t)
};
struct ConstantSignal {
  double value = 0.0;
};
// +level on the first half of each period, -level on the second.
struct BangBang {
  double period = 1.0;
  double level = 1.0;
};
using ControlSignal = std::variant<Sinusoid, ConstantSignal, BangBang>;

struct FixedInterval {
  double delta = 1.0;
};
// Polls once at activation and holds that control open-loop forever.
struct NeverPoll {};
using TimingOverride = std::variant<FixedInterval, NeverPoll>;

struct AcquisitionAttack {
  ValueTransform transform;
};
struct TransmissionAttack {
  ValueTransform transform;
};
struct ControlAttack {
  ControlSignal signal;
};
struct TimingAttack {
  TimingOverride timing;
};

struct AttackSpec {
  NodeId node = 0;
  std::variant<AcquisitionAttack, TransmissionAttack, ControlAttack, TimingAttack> attack;

  AttackKind kind() const { return static_cast<AttackKind>(attack.index()); }
};

inline constexpr double kNever = std::numeric_limits<double>::infinity();

class AttackError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Primitives

inline double apply_transform(const ValueTransform& transform, double value, RandomStream& rng) {
  struct Visitor {
    double value;
    RandomStream& rng;
    double operator()(const Bias& b) const { return value + b.offset; }
    double operator()(const Scale& s) const { return value * s.factor; }
    double operator()(const ConstantValue& c) const { return c.value; }
    double operator()(const Noise& n) const { return value + n.sigma * rng.normal(); }
  };
  return std::visit(Visitor{value, rng}, transform);
}

inline double evaluate(const ControlSignal& signal, double t) {
  struct Visitor {
    double t;
    double operator()(const Sinusoid& s) const {
      return s.amplitude * std::sin(2.0 * std::numbers::pi * s.frequency * t);
    }
    double operator()(const ConstantSignal& c) const { return c.value; }
    double operator()(const BangBang& b) const {
      const double phase = t - b.period * std::floor(t / b.period);
      return phase < 0.5 * b.period ? b.level : -b.level;
    }
  };
  return std::visit(Visitor{t}, signal);
}

// Integral of u over [t0, t1].
inline double integral(const ControlSignal& signal, double t0, double t1) {
  if (t0 == t1) return 0.0;
  struct Visitor {
    double t0;
    double t1;
    double operator()(const Sinusoid& s) const {
      if (s.frequency == 0.0) return 0.0;
      const double w = 2.0 * std::numbers::pi * s.frequency;
      return s.amplitude / w * (std::cos(w * t0) - std::cos(w * t1));
    }
    double operator()(const ConstantSignal& c) const { return c.value * (t1 - t0); }
    double operator()(const BangBang& b) const {
      // Antiderivative is a triangle wave: level * min(phase, period - phase).
      auto anti = [&b](double t) {
        const double phase = t - b.period * std::floor(t / b.period);
        return b.level * std::min(phase, b.period - phase);
      };
      return anti(t1) - anti(t0);
    }
  };
  return std::visit(Visitor{t0, t1}, signal);
}

// ---------------------------------------------------------------------------
// Per-spec operations

inline double perceive(const AttackSpec* spec, double z, RandomStream& rng) {
  if (spec == nullptr) return z;
  if (const auto* a = std::get_if<AcquisitionAttack>(&spec->attack)) return apply_transform(a->transform, z, rng);
  return z;
}

inline double emit(const AttackSpec* spec, double x, RandomStream& rng) {
  if (spec == nullptr) return x;
  if (const auto* a = std::get_if<TransmissionAttack>(&spec->attack)) return apply_transform(a->transform, x, rng);
  return x;
}

inline const ControlSignal& control_of(const AttackSpec& spec) {
  const auto* c = std::get_if<ControlAttack>(&spec.attack);
  if (c == nullptr) throw AttackError("attack on node " + std::to_string(spec.node) + " is not a control attack");
  return c->signal;
}

inline double control_signal(const AttackSpec& spec, double t) { return evaluate(control_of(spec), t); }

inline double control_integral(const AttackSpec& spec, double t0, double t1) {
  if (t1 < t0) throw std::domain_error("control_integral needs t0 <= t1");
  return integral(control_of(spec), t0, t1);
}

// Interval to the next poll, or kNever.
inline double timing_override(const TimingOverride& timing, double delta_min) {
  if (std::holds_alternative<NeverPoll>(timing)) return kNever;
  const double delta = std::get<FixedInterval>(timing).delta;
  if (!(delta >= delta_min)) {
    throw AttackError("timing override " + std::to_string(delta) + " is below the minimum inter-poll time " +
                      std::to_string(delta_min));
  }
  return delta;
}

inline double timing_override(const AttackSpec& spec, double delta_min) {
  const auto* t = std::get_if<TimingAttack>(&spec.attack);
  if (t == nullptr) throw AttackError("attack on node " + std::to_string(spec.node) + " is not a timing attack");
  return timing_override(t->timing, delta_min);
}

// ---------------------------------------------------------------------------
// Per-node aggregation used by the simulators.

struct NodeBehavior {
  std::optional<ValueTransform> acquisition;
  std::optional<ValueTransform> transmission;
  std::optional<ControlSignal> control;
  std::optional<TimingOverride> timing;

  bool misbehaving() const { return acquisition || transmission || control || timing; }
};

inline std::vector<NodeBehavior> build_behaviors(std::size_t n, const std::vector<AttackSpec>& attacks) {
  std::vector<NodeBehavior> out(n);
  for (const auto& spec : attacks) {
    if (spec.node >= n) throw AttackError("attack targets node " + std::to_string(spec.node) + " outside the graph");
    auto& b = out[spec.node];
    auto duplicate = [&] {
      return AttackError("node " + std::to_string(spec.node) + " has more than one " + to_string(spec.kind()) +
                         " attack");
    };
    std::visit(
        [&](const auto& a) {
          using T = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<T, AcquisitionAttack>) {
            if (b.acquisition) throw duplicate();
            b.acquisition = a.transform;
          } else if constexpr (std::is_same_v<T, TransmissionAttack>) {
            if (b.transmission) throw duplicate();
            b.transmission = a.transform;
          } else if constexpr (std::is_same_v<T, ControlAttack>) {
            if (b.control) throw duplicate();
            b.control = a.signal;
          } else {
            if (b.timing) throw duplicate();
            b.timing = a.timing;
          }
        },
        spec.attack);
  }
  return out;
}

inline std::set<NodeId> misbehaving_nodes(const std::vector<AttackSpec>& attacks) {
  std::set<NodeId> out;
  for (const auto& a : attacks) out.insert(a.node);
  return out;
}

// Structural checks on every spec; returns one message per problem.
// `delta_min` is indexed by node.
inline std::vector<std::string> validate_attacks(const std::vector<AttackSpec>& attacks, std::size_t n, std::size_t F,
                                                 const std::vector<double>& delta_min, bool allow_excess) {
  std::vector<std::string> problems;
  auto finite = [](double v) { return std::isfinite(v); };
  for (const auto& spec : attacks) {
    const std::string who = "attack on node " + std::to_string(spec.node) + " (" + to_string(spec.kind()) + "): ";
    if (spec.node >= n) {
      problems.push_back(who + "node outside the graph");
      continue;
    }
    std::visit(
        [&](const auto& a) {
          using T = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<T, AcquisitionAttack> || std::is_same_v<T, TransmissionAttack>) {
            if (std::is_same_v<T, AcquisitionAttack> && std::holds_alternative<ConstantValue>(a.transform))
              problems.push_back(who + "constant transform is only defined for transmission");
            std::visit(
                [&](const auto& tr) {
                  using U = std::decay_t<decltype(tr)>;
                  if constexpr (std::is_same_v<U, Bias>) {
                    if (!finite(tr.offset)) problems.push_back(who + "bias must be finite");
                  } else if constexpr (std::is_same_v<U, Scale>) {
                    if (!finite(tr.factor)) problems.push_back(who + "scale must be finite");
                  } else if constexpr (std::is_same_v<U, ConstantValue>) {
                    if (!finite(tr.value)) problems.push_back(who + "constant must be finite");
                  } else {
                    if (!finite(tr.sigma) || tr.sigma < 0.0) problems.push_back(who + "noise sigma must be >= 0");
                  }
                },
                a.transform);
          } else if constexpr (std::is_same_v<T, ControlAttack>) {
            std::visit(
                [&](const auto& s) {
                  using U = std::decay_t<decltype(s)>;
                  if constexpr (std::is_same_v<U, Sinusoid>) {
                    if (!finite(s.amplitude) || !finite(s.frequency) || s.frequency < 0.0)
                      problems.push_back(who + "sinusoid needs finite amplitude and frequency >= 0");
                  } else if constexpr (std::is_same_v<U, ConstantSignal>) {
                    if (!finite(s.value)) problems.push_back(who + "constant signal must be finite");
                  } else {
                    if (!finite(s.level) || !finite(s.period) || s.period <= 0.0)
                      problems.push_back(who + "bang_bang needs period > 0 and a finite level");
                  }
                },
                a.signal);
          } else {
            if (const auto* fixed = std::get_if<FixedInterval>(&a.timing)) {
              const double floor = spec.node < delta_min.size() ? delta_min[spec.node] : 0.0;
              if (!(fixed->delta >= floor) || !finite(fixed->delta))
                problems.push_back(who + "interval " + std::to_string(fixed->delta) +
                                   " is below the node's minimum inter-poll time " + std::to_string(floor));
            }
          }
        },
        spec.attack);
  }
  std::vector<AttackSpec> in_range;
  for (const auto& spec : attacks) {
    if (spec.node < n) in_range.push_back(spec);
  }
  try {
    build_behaviors(n, in_range);
  } catch (const AttackError& e) {
    problems.emplace_back(e.what());
  }
  const auto bad = misbehaving_nodes(attacks);
  if (bad.size() > F && !allow_excess) {
    problems.push_back(std::to_string(bad.size()) + " misbehaving nodes exceed the budget F = " + std::to_string(F));
  }
  return problems;
}

}  // namespace rcsim
