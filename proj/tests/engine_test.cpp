#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rcsim/engine.hpp"

using namespace rcsim;

namespace {

Scenario two_nodes(double a, double b) {
  Scenario s;
  s.graph = gen_complete(2);
  s.params.epsilon = 0.01;
  s.params.F = 0;
  s.params.delta_min = ProtocolParams::largest_delta_min(s.graph, 0.01);
  s.x0 = {a, b};
  s.t0 = {0.0, 0.0};
  s.t_end = 1.0;
  return s;
}

std::vector<EventRow> events_of(const Trace& t, NodeId node) {
  std::vector<EventRow> out;
  for (const auto& e : t.events)
    if (e.node == node) out.push_back(e);
  return out;
}

}  // namespace

TEST(Engine, TwoNodesHandComputed) {
  Scenario s = two_nodes(0.0, 1.0);
  s.t_end = 0.3;
  const Trace t = run(s);
  ASSERT_GE(t.events.size(), 4u);
  // Node 0 activates first and sees no active neighbor: hold, poll at eps/4.
  EXPECT_EQ(t.events[0].node, 0u);
  EXPECT_EQ(t.events[0].kind, EventKind::Activation);
  EXPECT_EQ(t.events[0].ave, 0.0);
  EXPECT_EQ(t.events[0].u, 0.0);
  EXPECT_EQ(t.events[0].delta, 0.0025);
  // Node 1 activates at the same instant and already sees node 0.
  EXPECT_EQ(t.events[1].node, 1u);
  EXPECT_EQ(t.events[1].ave, -1.0);
  EXPECT_EQ(t.events[1].u, -1.0);
  EXPECT_EQ(t.events[1].delta, 0.25);
  // Node 0 polls again after node 1 has moved down by 0.0025.
  EXPECT_EQ(t.events[2].node, 0u);
  EXPECT_EQ(t.events[2].t, 0.0025);
  EXPECT_EQ(t.events[2].x, 0.0);
  EXPECT_DOUBLE_EQ(t.events[2].ave, 0.9975);
  EXPECT_EQ(t.events[2].u, 1.0);
  EXPECT_DOUBLE_EQ(t.events[2].delta, 0.249375);
  // Node 1 at t = 0.25: x1 = 0.75, x0 = 0.2475.
  EXPECT_EQ(t.events[3].node, 1u);
  EXPECT_EQ(t.events[3].t, 0.25);
  EXPECT_DOUBLE_EQ(t.events[3].x, 0.75);
  EXPECT_DOUBLE_EQ(t.events[3].ave, -0.5025);
  EXPECT_DOUBLE_EQ(t.events[3].delta, 0.125625);
}

TEST(Engine, SettlesWithinEpsilonBand) {
  Scenario s = two_nodes(0.0, 1.0);
  s.t_end = 2.0;
  const Trace t = run(s);
  const auto& last = t.dense.back();
  EXPECT_EQ(last.t, 2.0);
  EXPECT_LT(std::abs(last.x[1] - last.x[0]), 0.01 + 1e-12);
  EXPECT_EQ(last.u[0], 0.0);
  EXPECT_EQ(last.u[1], 0.0);
}

TEST(Engine, InitialQueueOrdersByTimeThenNode) {
  Scenario s = make_scenario(gen_fig1(), 0.01, 1, 0.15, 1.0, 3);
  s.t0 = {0.1, 0.05, 0.0, 0.05, 0.15, 0.1, 0.0};
  const Engine engine(s);
  const auto pending = engine.pending();
  ASSERT_EQ(pending.size(), 7u);
  const std::vector<NodeId> order = {2, 6, 1, 3, 0, 5, 4};
  for (std::size_t k = 0; k < 7; ++k) {
    EXPECT_EQ(pending[k].node, order[k]);
    EXPECT_EQ(pending[k].kind, EventKind::Activation);
  }
}

TEST(Engine, ZeroHorizonRunsOnlyTimeZeroRounds) {
  Scenario s = make_scenario(gen_fig1(), 0.01, 1, 0.15, 0.0, 4);
  const Trace t = run(s);
  for (const auto& e : t.events) EXPECT_EQ(e.t, 0.0);
  EXPECT_FALSE(t.events.empty());
  ASSERT_EQ(t.dense.size(), 1u);
  EXPECT_EQ(t.dense[0].t, 0.0);
}

TEST(Engine, RejectsLateEarliestActivation) {
  Scenario s = two_nodes(0.0, 1.0);
  s.t_init = 0.5;
  s.t0 = {0.1, 0.2};
  EXPECT_THROW(Engine{s}, ScenarioError);
}

TEST(Engine, RejectsOversizedDeltaMin) {
  Scenario s = two_nodes(0.0, 1.0);
  s.params.delta_min = {0.01, 0.0025};
  EXPECT_THROW(Engine{s}, ScenarioError);
}

TEST(Engine, WarnsOnIsolatedNode) {
  Scenario s = make_scenario(Graph(3, {{0, 1}}), 0.01, 0, 0.0, 0.1, 1);
  const Trace t = run(s);
  ASSERT_EQ(t.warnings.size(), 1u);
  EXPECT_NE(t.warnings[0].find("node 2"), std::string::npos);
  for (const auto& e : events_of(t, 2)) {
    EXPECT_EQ(e.accepted, 0u);
    EXPECT_EQ(e.delta, 0.01 / 4.0);
  }
}

TEST(Engine, EventBudgetBreaks) {
  Scenario s = make_scenario(gen_fig1(), 0.01, 1, 0.15, 10.0, 1);
  s.max_events = 500;
  try {
    run(s);
    FAIL() << "budget not enforced";
  } catch (const EventBudgetExceeded& e) {
    EXPECT_NE(std::string(e.what()).find("densest node"), std::string::npos);
  }
}

TEST(Engine, AdvanceToRejectsBackwards) {
  Engine engine(two_nodes(0.0, 1.0));
  engine.step();
  engine.advance_to(0.5);
  EXPECT_THROW(engine.advance_to(0.25), std::logic_error);
}

TEST(Engine, TimingAttackerPollsAtFixedInterval) {
  const std::vector<AttackSpec> attacks = {{5, TimingAttack{FixedInterval{1.0}}}};
  const Trace t = run(make_scenario(gen_fig1(true), 0.01, 1, 0.15, 5.0, 2, attacks));
  const auto rows = events_of(t, 5);
  ASSERT_GE(rows.size(), 5u);
  for (std::size_t k = 1; k < rows.size(); ++k) EXPECT_NEAR(rows[k].t - rows[k - 1].t, 1.0, 1e-12);
  for (const auto& e : rows) EXPECT_EQ(e.delta, 1.0);
}

TEST(Engine, NeverPollHoldsFirstDecision) {
  const std::vector<AttackSpec> attacks = {{5, TimingAttack{NeverPoll{}}}};
  const Trace t = run(make_scenario(gen_fig1(true), 0.01, 1, 0.15, 2.0, 2, attacks));
  const auto rows = events_of(t, 5);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].delta, kNever);
  for (const auto& d : t.dense)
    if (d.t > rows[0].t) EXPECT_EQ(d.u[5], rows[0].u);
}

TEST(Engine, ControlAttackerFollowsClosedForm) {
  const ControlSignal signal = Sinusoid{10.0, 5.0};
  const std::vector<AttackSpec> attacks = {{5, ControlAttack{signal}}};
  const Scenario s = make_scenario(gen_fig1(), 0.01, 1, 0.15, 2.0, 5, attacks);
  const Trace t = run(s);
  const double t0 = s.t0[5];
  for (const auto& d : t.dense) {
    const double expected = d.t <= t0 ? s.x0[5] : s.x0[5] + integral(signal, t0, d.t);
    EXPECT_NEAR(d.x[5], expected, 1e-9) << "t=" << d.t;
    if (d.t > t0) EXPECT_NEAR(d.u[5], evaluate(signal, d.t), 1e-12);
  }
}

TEST(Engine, TransmissionValueIsSharedAtAnInstant) {
  // Node 0 broadcasts noise; nodes 1 and 2 poll at the same instant and must
  // see the same corrupted value.
  Scenario s;
  s.graph = Graph(3, {{0, 1}, {0, 2}});
  s.params.epsilon = 0.01;
  s.params.F = 0;
  s.params.delta_min = ProtocolParams::largest_delta_min(s.graph, 0.01);
  s.x0 = {0.5, 0.5, 0.5};
  s.t0 = {0.0, 0.0, 0.0};
  s.t_end = 0.0;
  s.allow_excess_attackers = true;
  s.attacks = {{0, TransmissionAttack{Noise{1.0}}}};
  const Trace t = run(s);
  ASSERT_EQ(t.events.size(), 3u);
  EXPECT_EQ(t.events[1].ave, t.events[2].ave);
  EXPECT_NE(t.events[1].ave, 0.0);
}

TEST(EngineProperty, InvariantsOnRandomScenarios) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 3 + rng() % 6;
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId a = 0; a < n; ++a)
      for (NodeId b = a + 1; b < n; ++b)
        if (rng() % 2) edges.emplace_back(a, b);
    for (NodeId a = 1; a < n; ++a) edges.emplace_back(a - 1, a);
    Scenario s = make_scenario(Graph(n, edges), 0.05, rng() % 2, 0.1, 1.0, trial);
    const Trace t = run(s);
    const Trace again = run(s);
    ASSERT_EQ(t.events, again.events);
    ASSERT_EQ(t.dense, again.dense);

    for (std::size_t k = 1; k < t.events.size(); ++k) {
      const auto& p = t.events[k - 1];
      const auto& e = t.events[k];
      ASSERT_TRUE(p.t < e.t || (p.t == e.t && p.node < e.node));
    }
    std::vector<std::optional<EventRow>> last(n);
    for (std::size_t k = 0; k < t.events.size(); ++k) {
      const auto& e = t.events[k];
      ASSERT_TRUE(e.u == -1.0 || e.u == 0.0 || e.u == 1.0);
      const std::size_t d = s.graph.degree(e.node);
      ASSERT_GE(e.delta, s.params.delta_min[e.node]);
      ASSERT_LE(e.delta, schedule_upper_bound(e.ave, 0.05, d) * (1 + 1e-15));
      if (last[e.node]) {
        ASSERT_EQ(e.kind, EventKind::Update);
        ASSERT_NEAR(e.t, last[e.node]->t + last[e.node]->delta, 1e-12);
        // Exact affine motion between the node's own rounds.
        ASSERT_NEAR(e.x, last[e.node]->x + last[e.node]->u * (e.t - last[e.node]->t), 1e-12);
      } else {
        ASSERT_EQ(e.kind, EventKind::Activation);
        ASSERT_EQ(e.t, s.t0[e.node]);
      }
      last[e.node] = e;
    }
  }
}
