#include <gtest/gtest.h>

#include <array>
#include <random>
#include <sstream>
#include <string>

#include "rcsim/graph.hpp"

using namespace rcsim;

namespace {

// Independent description of the example network: label pairs read off the
// figure, counted through a dense adjacency matrix.
struct LabelMatrix {
  static constexpr std::string_view labels = "ABDEFGH";
  std::array<std::array<bool, 7>, 7> adj{};

  explicit LabelMatrix(bool with_red) {
    const char* black[] = {"AF", "AG", "AH", "BA", "BF", "BG", "BH", "DE", "DF",
                           "DG", "DH", "EF", "EG", "EH", "FG", "FH", "GH"};
    const char* red[] = {"BD", "AD", "AE"};
    for (const char* e : black) link(e);
    if (with_red)
      for (const char* e : red) link(e);
  }
  void link(const char* e) {
    const auto a = labels.find(e[0]);
    const auto b = labels.find(e[1]);
    adj[a][b] = adj[b][a] = true;
  }
  std::size_t common(std::size_t a, std::size_t b) const {
    std::size_t c = 0;
    for (std::size_t k = 0; k < 7; ++k) c += adj[a][k] && adj[b][k];
    return c;
  }
  std::size_t min_common() const {
    std::size_t m = 99;
    for (std::size_t a = 0; a < 7; ++a)
      for (std::size_t b = a + 1; b < 7; ++b) m = std::min(m, common(a, b));
    return m;
  }
};

void expect_well_formed(const Graph& g) {
  for (NodeId i = 0; i < g.size(); ++i) {
    EXPECT_FALSE(g.has_edge(i, i));
    for (NodeId j : g.neighbors(i)) EXPECT_TRUE(g.has_edge(j, i)) << i << "-" << j;
  }
}

}  // namespace

TEST(Graph, Fig1MatchesIndependentEnumeration) {
  for (bool reduced : {false, true}) {
    const Graph g = gen_fig1(reduced);
    const LabelMatrix ref(!reduced);
    ASSERT_EQ(g.size(), 7u);
    for (NodeId a = 0; a < 7; ++a)
      for (NodeId b = 0; b < 7; ++b) EXPECT_EQ(g.has_edge(a, b), ref.adj[a][b]) << a << "," << b;
    for (NodeId a = 0; a < 7; ++a)
      for (NodeId b = a + 1; b < 7; ++b) EXPECT_EQ(common_neighbors(g, a, b).size(), ref.common(a, b));
  }
}

TEST(Graph, Fig1Counts) {
  const Graph full = gen_fig1(false);
  EXPECT_EQ(full.edge_count(), 20u);
  EXPECT_EQ(full.degree(0), 6u);  // A
  EXPECT_EQ(full.degree(1), 5u);  // B
  EXPECT_EQ(full.degree(5), 6u);  // G
  const Graph reduced = gen_fig1(true);
  EXPECT_EQ(reduced.edge_count(), 17u);
  EXPECT_EQ(reduced.degree(5), 6u);
  EXPECT_TRUE(full.connected());
  EXPECT_TRUE(reduced.connected());
}

TEST(Graph, CommonNeighborsOfAandB) {
  // A=0, B=1 -> {D, F, G, H} = {2, 4, 5, 6}
  EXPECT_EQ(common_neighbors(gen_fig1(), 0, 1), (std::vector<NodeId>{2, 4, 5, 6}));
}

TEST(Graph, CommonNeighborsSmallCases) {
  const Graph k5 = gen_complete(5);
  EXPECT_EQ(common_neighbors(k5, 1, 3), (std::vector<NodeId>{0, 2, 4}));
  const Graph k3 = gen_complete(3);
  EXPECT_EQ(common_neighbors(k3, 0, 1), (std::vector<NodeId>{2}));
  const Graph path(4, {{0, 1}, {2, 3}});
  EXPECT_TRUE(common_neighbors(path, 0, 3).empty());
  EXPECT_FALSE(path.connected());
}

TEST(Graph, CommonNeighborsRejectsBadIds) {
  const Graph k3 = gen_complete(3);
  EXPECT_THROW(common_neighbors(k3, 0, 3), std::out_of_range);
  EXPECT_THROW(common_neighbors(k3, 1, 1), std::domain_error);
}

TEST(Graph, ConstructionRejectsSelfLoopsAndRange) {
  EXPECT_THROW(Graph(3, {{1, 1}}), GraphError);
  EXPECT_THROW(Graph(3, {{0, 3}}), GraphError);
}

TEST(Graph, CompleteGraphEdgeCounts) {
  EXPECT_EQ(gen_complete(1).edge_count(), 0u);
  EXPECT_EQ(gen_complete(5).edge_count(), 10u);
}

TEST(Assumption, Fig1FullPassesGeneric) {
  const auto report = check_assumption(gen_fig1(false), 1, AssumptionVariant::Generic);
  EXPECT_TRUE(report.satisfied);
  EXPECT_EQ(report.threshold, 4u);
  EXPECT_EQ(report.min_common, LabelMatrix(true).min_common());
  EXPECT_EQ(report.min_common, 4u);
}

TEST(Assumption, Fig1ReducedPassesOnlyAcquisitionTiming) {
  const Graph g = gen_fig1(true);
  const auto acq = check_assumption(g, 1, AssumptionVariant::AcquisitionTiming);
  EXPECT_TRUE(acq.satisfied);
  EXPECT_EQ(acq.min_common, LabelMatrix(false).min_common());
  EXPECT_EQ(acq.min_common, 3u);
  const auto generic = check_assumption(g, 1, AssumptionVariant::Generic);
  EXPECT_FALSE(generic.satisfied);
  EXPECT_FALSE(generic.violating_pairs.empty());
  EXPECT_EQ(generic.violating_pairs.front(), (PairDeficit{0, 1, 3}));
}

TEST(Assumption, SubsetRestrictsPairs) {
  // Only the pair (0, 1) of a path 0-2-1 plus a pendant 3 on node 2.
  const Graph g(4, {{0, 2}, {1, 2}, {2, 3}});
  EXPECT_FALSE(check_assumption(g, 0, AssumptionVariant::Generic).satisfied);
  const auto sub = check_assumption(g, 0, AssumptionVariant::Generic, std::vector<NodeId>{0, 1});
  EXPECT_TRUE(sub.satisfied);
  EXPECT_EQ(sub.min_common, 1u);
}

TEST(Assumption, ZeroBudgetNeedsOneSharedNeighbor) {
  EXPECT_EQ(check_assumption(gen_complete(3), 0, AssumptionVariant::Generic).threshold, 1u);
  EXPECT_TRUE(check_assumption(gen_complete(3), 0, AssumptionVariant::Generic).satisfied);
  EXPECT_FALSE(check_assumption(gen_complete(2), 0, AssumptionVariant::Generic).satisfied);
}

TEST(CliqueCore, SevenNodeExample) {
  const Graph g = gen_clique_core(4, 2);
  EXPECT_EQ(g.size(), 7u);
  EXPECT_EQ(g.edge_count(), 20u);
  EXPECT_TRUE(check_common_neighbors(g, 4).satisfied);
}

TEST(CliqueCore, SmallestIsK2) { EXPECT_EQ(gen_clique_core(1, 0), gen_complete(2)); }

TEST(CliqueCore, ThresholdHoldsWheneverNodesAreAttached) {
  for (std::size_t lambda = 1; lambda <= 6; ++lambda) {
    for (std::size_t k = 1; k <= 10; ++k) {
      const auto report = check_common_neighbors(gen_clique_core(lambda, k), lambda);
      EXPECT_TRUE(report.satisfied) << "lambda=" << lambda << " k=" << k;
    }
  }
}

TEST(CliqueCore, BareCliqueFallsOneShort) {
  // K_{lambda+1} alone: two clique members share only lambda-1 neighbors.
  for (std::size_t lambda = 1; lambda <= 6; ++lambda) {
    const auto report = check_common_neighbors(gen_clique_core(lambda, 0), lambda);
    EXPECT_FALSE(report.satisfied);
    EXPECT_EQ(report.min_common, lambda - 1);
  }
}

TEST(GraphProperty, RandomGraphsAreSymmetricAndMonotoneInF) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng() % 12;
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId a = 0; a < n; ++a)
      for (NodeId b = a + 1; b < n; ++b)
        if (rng() % 100 < 60) edges.emplace_back(a, b);
    const Graph g(n, edges);
    expect_well_formed(g);
    for (auto variant : {AssumptionVariant::Generic, AssumptionVariant::AcquisitionTiming}) {
      bool prev = true;
      for (std::size_t F = 0; F <= 4; ++F) {
        const bool now = check_assumption(g, F, variant).satisfied;
        EXPECT_FALSE(now && !prev) << "satisfied again at F=" << F;
        prev = now;
      }
    }
  }
  for (std::size_t lambda = 1; lambda <= 6; ++lambda)
    for (std::size_t k = 0; k <= 10; ++k) expect_well_formed(gen_clique_core(lambda, k));
}

TEST(EdgeList, WriteThenRead) {
  const Graph g = gen_clique_core(3, 2);
  std::stringstream buffer;
  write_edge_list(buffer, g);
  EXPECT_EQ(buffer.str().substr(0, 4), "n 6\n");
  EXPECT_EQ(read_edge_list(buffer), g);
}

TEST(EdgeList, AcceptsMirroredListing) {
  std::istringstream in("n 3\n0 1\n1 0\n# comment\n\n1 2\n2 1\n");
  EXPECT_EQ(read_edge_list(in).edge_count(), 2u);
}

TEST(EdgeList, RejectsMalformedInput) {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return read_edge_list(in);
  };
  EXPECT_THROW(parse("0 1\n"), GraphError);
  EXPECT_THROW(parse("n 2\n0 2\n"), GraphError);
  EXPECT_THROW(parse("n 2\n0 0\n"), GraphError);
  EXPECT_THROW(parse("n 3\n0 x\n"), GraphError);
  EXPECT_THROW(parse(""), GraphError);
  try {
    parse("n 3\n0 1\n1 0\n1 2\n");
    FAIL() << "asymmetric listing accepted";
  } catch (const GraphError& e) {
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
  }
}
