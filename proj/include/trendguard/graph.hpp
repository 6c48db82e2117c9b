#pragma once

// User-trend networks: construction, k-core and single-attack filtering,
// Louvain communities and per-community activity summaries.

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "trendguard/content.hpp"
#include "trendguard/core.hpp"
#include "trendguard/ingest.hpp"

namespace trendguard {

enum class NodeKind { User, Trend, Generic };

std::string_view node_kind_name(NodeKind k);

struct Node {
  NodeKind kind = NodeKind::Generic;
  std::string label;

  auto operator<=>(const Node&) const = default;
};

struct Edge {
  std::size_t a = 0;
  std::size_t b = 0;
  std::uint64_t weight = 0;
};

// Undirected graph with positive integer weights. In bipartite mode edges
// must join a user to a trend.
class Graph {
 public:
  explicit Graph(bool bipartite = true) : bipartite_(bipartite) {}

  bool bipartite() const { return bipartite_; }

  // Returns the existing index when the node is already present.
  std::size_t add_node(NodeKind kind, const std::string& label);
  std::optional<std::size_t> find(NodeKind kind, const std::string& label) const;

  // Adds to the weight of an existing edge. Throws Errc::InvalidGraph on
  // self-loops, zero weight, or a same-kind edge in bipartite mode.
  void add_edge(std::size_t a, std::size_t b, std::uint64_t weight = 1);

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const;
  const Node& node(std::size_t i) const { return nodes_.at(i); }
  const std::map<std::size_t, std::uint64_t>& neighbors(std::size_t i) const {
    return adj_.at(i);
  }
  std::size_t degree(std::size_t i) const { return adj_.at(i).size(); }
  std::uint64_t strength(std::size_t i) const;
  std::uint64_t total_weight() const;
  // Each edge once, a < b, ordered by (a, b).
  std::vector<Edge> edges() const;

  // Subgraph on the kept nodes, renumbered in canonical node order.
  Graph induced(const std::vector<bool>& keep) const;

  // Same node set and the same weighted edges between equally labelled nodes.
  bool operator==(const Graph& o) const;

 private:
  bool bipartite_;
  std::vector<Node> nodes_;
  std::map<Node, std::size_t> index_;
  std::vector<std::map<std::size_t, std::uint64_t>> adj_;
};

enum class EdgePredicate { Undeleted, DeletedLexicon };

// Nodes come out sorted by (kind, label); users are labelled by their decimal
// id and trends by TrendRef::label(). flags align with instances.
Graph build_graph(std::span<const TrendInstance> instances,
                  std::span<const std::vector<TweetFlags>> flags,
                  EdgePredicate predicate);

// Largest subgraph in which every node has at least k neighbours.
Graph k_core(const Graph& g, std::size_t k);

// Drops users with a single neighbour, then every node left isolated.
Graph single_attack_filter(const Graph& g);

inline constexpr std::size_t kUnassigned = static_cast<std::size_t>(-1);

struct Partition {
  std::vector<std::size_t> community;  // per node index, ids 0..n-1
  double modularity = 0;

  std::size_t community_count() const;
};

// Newman modularity. Unassigned nodes (kUnassigned or a short vector) throw
// Errc::IncompleteAssignment. An edgeless graph scores 0.
double modularity(const Graph& g, std::span<const std::size_t> community,
                  bool weighted = true);

// Two-phase Louvain. The visiting order is a seeded shuffle; equal gains go to
// the lowest community id and a node only moves for a strictly better gain.
// Communities are numbered by first appearance in node order.
// Throws Errc::EmptyGraph.
Partition louvain(const Graph& g, std::uint64_t seed, bool weighted = true);

struct UserActivity {
  std::vector<Timestamp> attacks;
  std::optional<Timestamp> last_undeleted;
};

// Attack times are creations of deleted lexicon tweets; every undeleted tweet
// counts as ordinary activity.
std::map<std::uint64_t, UserActivity> user_activity(
    std::span<const TrendInstance> instances,
    std::span<const std::vector<TweetFlags>> flags);

struct DormancyGap {
  std::uint64_t user = 0;
  Duration gap;
  bool dormant = false;
};

struct CommunitySummary {
  std::size_t community = 0;
  std::size_t n_users = 0;
  std::size_t n_trends = 0;
  std::optional<Timestamp> first_seen;
  std::optional<Timestamp> last_seen;
  std::vector<DormancyGap> dormancy_gaps;  // users with both kinds of activity
};

std::vector<CommunitySummary> community_summary(
    const Graph& g, const Partition& p,
    const std::map<std::uint64_t, UserActivity>& activity,
    Duration dormancy_threshold = Duration::days(365));

// Users present in both graphs.
std::size_t user_overlap(const Graph& a, const Graph& b);

void write_edges(std::ostream& out, const Graph& g);
void write_partition(std::ostream& out, const Graph& g, const Partition& p);
void write_community_summary(std::ostream& out,
                             std::span<const CommunitySummary> summaries);

}  // namespace trendguard
