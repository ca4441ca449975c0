#pragma once

// Undirected, time-invariant communication topology plus the common-neighbor
// conditions used to size the misbehavior budget F.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <iterator>
#include <limits>
#include <optional>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rcsim {

using NodeId = std::size_t;

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Graph {
 public:
  Graph() = default;

  // Builds the graph from undirected edges; duplicates collapse, self-loops
  // and out-of-range endpoints are rejected.
  Graph(std::size_t n, const std::vector<std::pair<NodeId, NodeId>>& edges) : adjacency_(n) {
    for (const auto& [a, b] : edges) {
      if (a >= n || b >= n) {
        throw GraphError("edge (" + std::to_string(a) + ", " + std::to_string(b) +
                         ") references a node outside [0, " + std::to_string(n) + ")");
      }
      if (a == b) throw GraphError("self-loop on node " + std::to_string(a));
      adjacency_[a].push_back(b);
      adjacency_[b].push_back(a);
    }
    for (auto& list : adjacency_) {
      std::sort(list.begin(), list.end());
      list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    connected_ = compute_connected();
  }

  std::size_t size() const { return adjacency_.size(); }

  const std::vector<NodeId>& neighbors(NodeId i) const {
    check_id(i);
    return adjacency_[i];
  }

  std::size_t degree(NodeId i) const { return neighbors(i).size(); }

  bool has_edge(NodeId a, NodeId b) const {
    const auto& list = neighbors(a);
    return std::binary_search(list.begin(), list.end(), b);
  }

  std::size_t edge_count() const {
    std::size_t twice = 0;
    for (const auto& list : adjacency_) twice += list.size();
    return twice / 2;
  }

  // Each undirected edge once, as (low, high), lexicographically ordered.
  std::vector<std::pair<NodeId, NodeId>> edges() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    for (NodeId i = 0; i < adjacency_.size(); ++i) {
      for (NodeId j : adjacency_[i]) {
        if (i < j) out.emplace_back(i, j);
      }
    }
    return out;
  }

  // BFS from node 0; recorded at construction.
  bool connected() const { return connected_; }

  void check_id(NodeId i) const {
    if (i >= adjacency_.size()) {
      throw std::out_of_range("node id " + std::to_string(i) + " outside [0, " +
                              std::to_string(adjacency_.size()) + ")");
    }
  }

  friend bool operator==(const Graph& a, const Graph& b) { return a.adjacency_ == b.adjacency_; }

 private:
  bool compute_connected() const {
    if (adjacency_.empty()) return true;
    std::vector<bool> seen(adjacency_.size(), false);
    std::queue<NodeId> frontier;
    frontier.push(0);
    seen[0] = true;
    std::size_t reached = 1;
    while (!frontier.empty()) {
      NodeId v = frontier.front();
      frontier.pop();
      for (NodeId w : adjacency_[v]) {
        if (!seen[w]) {
          seen[w] = true;
          ++reached;
          frontier.push(w);
        }
      }
    }
    return reached == adjacency_.size();
  }

  std::vector<std::vector<NodeId>> adjacency_;
  bool connected_ = true;
};

inline std::vector<NodeId> common_neighbors(const Graph& g, NodeId i, NodeId j) {
  g.check_id(i);
  g.check_id(j);
  if (i == j) throw std::domain_error("common_neighbors needs two distinct nodes");
  const auto& a = g.neighbors(i);
  const auto& b = g.neighbors(j);
  std::vector<NodeId> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

struct PairDeficit {
  NodeId a = 0;
  NodeId b = 0;
  std::size_t common = 0;
  friend bool operator==(const PairDeficit&, const PairDeficit&) = default;
};

struct ConnectivityReport {
  std::size_t threshold = 0;
  // numeric_limits<size_t>::max() when no pair was examined.
  std::size_t min_common = std::numeric_limits<std::size_t>::max();
  std::vector<PairDeficit> violating_pairs;
  bool satisfied = true;
  friend bool operator==(const ConnectivityReport&, const ConnectivityReport&) = default;
};

// Generic misbehavior needs 3F+1 shared neighbors per pair; acquisition or
// timing misbehavior only needs 2F+1.
enum class AssumptionVariant { Generic, AcquisitionTiming };

inline std::size_t common_neighbor_threshold(std::size_t F, AssumptionVariant variant) {
  return variant == AssumptionVariant::Generic ? 3 * F + 1 : 2 * F + 1;
}

// Scans every pair of distinct nodes drawn from `subset` (all nodes when empty).
inline ConnectivityReport check_common_neighbors(const Graph& g, std::size_t threshold,
                                                 const std::optional<std::vector<NodeId>>& subset = std::nullopt) {
  std::vector<NodeId> nodes;
  if (subset) {
    nodes = *subset;
    for (NodeId v : nodes) g.check_id(v);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  } else {
    nodes.resize(g.size());
    for (NodeId v = 0; v < g.size(); ++v) nodes[v] = v;
  }

  ConnectivityReport report;
  report.threshold = threshold;
  for (std::size_t x = 0; x < nodes.size(); ++x) {
    for (std::size_t y = x + 1; y < nodes.size(); ++y) {
      const std::size_t count = common_neighbors(g, nodes[x], nodes[y]).size();
      report.min_common = std::min(report.min_common, count);
      if (count < threshold) report.violating_pairs.push_back({nodes[x], nodes[y], count});
    }
  }
  report.satisfied = report.violating_pairs.empty();
  return report;
}

inline ConnectivityReport check_assumption(const Graph& g, std::size_t F, AssumptionVariant variant,
                                           const std::optional<std::vector<NodeId>>& subset = std::nullopt) {
  return check_common_neighbors(g, common_neighbor_threshold(F, variant), subset);
}

// ---------------------------------------------------------------------------
// Generators

inline Graph gen_complete(std::size_t n) {
  if (n < 1) throw GraphError("complete graph needs n >= 1");
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  return Graph(n, edges);
}

// Clique on lambda+1 nodes (ids 0..lambda) plus k nodes each wired to the
// whole clique. Pairs involving at least one added node share >= lambda
// neighbors; two clique nodes share lambda-1+k.
inline Graph gen_clique_core(std::size_t lambda, std::size_t k) {
  if (lambda < 1) throw GraphError("clique_core needs lambda >= 1");
  const std::size_t core = lambda + 1;
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId i = 0; i < core; ++i)
    for (NodeId j = i + 1; j < core; ++j) edges.emplace_back(i, j);
  for (NodeId p = core; p < core + k; ++p)
    for (NodeId c = 0; c < core; ++c) edges.emplace_back(c, p);
  return Graph(core + k, edges);
}

inline constexpr const char* kFig1Labels = "ABDEFGH";

// Seven-node example network with labels mapped alphabetically
// A=0 B=1 D=2 E=3 F=4 G=5 H=6. `without_red_edges` drops A-D, A-E, B-D.
inline Graph gen_fig1(bool without_red_edges = false) {
  enum : NodeId { A = 0, B, D, E, F, G, H };
  std::vector<std::pair<NodeId, NodeId>> edges = {
      {A, B}, {A, F}, {A, G}, {A, H}, {B, F}, {B, G}, {B, H}, {D, E}, {D, F},
      {D, G}, {D, H}, {E, F}, {E, G}, {E, H}, {F, G}, {F, H}, {G, H},
  };
  if (!without_red_edges) {
    edges.insert(edges.end(), {{A, D}, {A, E}, {B, D}});
  }
  return Graph(7, edges);
}

// ---------------------------------------------------------------------------
// Edge-list text format: "n <count>" header, then one "i j" pair per line.
// Blank lines and '#' comments are ignored.

inline void write_edge_list(std::ostream& out, const Graph& g) {
  out << "n " << g.size() << '\n';
  for (const auto& [a, b] : g.edges()) out << a << ' ' << b << '\n';
}

// A file may list each undirected edge once or in both directions; mixing
// the two (some edges mirrored, others not) is reported as asymmetric.
inline Graph read_edge_list(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> n;
  std::vector<std::pair<NodeId, NodeId>> directed;
  std::vector<std::size_t> line_of;

  auto fail = [&](const std::string& what) -> GraphError {
    return GraphError("line " + std::to_string(line_no) + ": " + what);
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string first;
    if (!(fields >> first)) continue;
    if (!n) {
      long long count = -1;
      if (first != "n" || !(fields >> count) || count < 0) throw fail("expected header 'n <count>'");
      n = static_cast<std::size_t>(count);
    } else {
      long long a = -1;
      long long b = -1;
      std::istringstream pair(line);
      std::string extra;
      if (!(pair >> a >> b) || a < 0 || b < 0) throw fail("expected 'i j' with non-negative ids");
      if (pair >> extra) throw fail("trailing tokens after edge");
      if (static_cast<std::size_t>(a) >= *n || static_cast<std::size_t>(b) >= *n)
        throw fail("node id outside [0, " + std::to_string(*n) + ")");
      if (a == b) throw fail("self-loop on node " + std::to_string(a));
      directed.emplace_back(static_cast<NodeId>(a), static_cast<NodeId>(b));
      line_of.push_back(line_no);
    }
  }
  if (!n) throw GraphError("missing header 'n <count>'");

  auto sorted = directed;
  std::sort(sorted.begin(), sorted.end());
  bool any_mirrored = false;
  for (const auto& [a, b] : directed) {
    if (std::binary_search(sorted.begin(), sorted.end(), std::make_pair(b, a))) {
      any_mirrored = true;
      break;
    }
  }
  if (any_mirrored) {
    for (std::size_t e = 0; e < directed.size(); ++e) {
      const auto& [a, b] = directed[e];
      if (!std::binary_search(sorted.begin(), sorted.end(), std::make_pair(b, a))) {
        line_no = line_of[e];
        throw fail("asymmetric edge list: " + std::to_string(a) + " -> " + std::to_string(b) +
                   " has no reverse entry");
      }
    }
  }
  return Graph(*n, directed);
}

}  // namespace rcsim
