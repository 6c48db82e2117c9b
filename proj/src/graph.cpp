#include "trendguard/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <tuple>

#include "trendguard/csv.hpp"
#include "trendguard/features.hpp"

namespace trendguard {

std::string_view node_kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::User: return "user";
    case NodeKind::Trend: return "trend";
    case NodeKind::Generic: return "node";
  }
  return "node";
}

std::size_t Graph::add_node(NodeKind kind, const std::string& label) {
  Node n{kind, label};
  auto [it, inserted] = index_.try_emplace(n, nodes_.size());
  if (inserted) {
    nodes_.push_back(std::move(n));
    adj_.emplace_back();
  }
  return it->second;
}

std::optional<std::size_t> Graph::find(NodeKind kind, const std::string& label) const {
  if (auto it = index_.find(Node{kind, label}); it != index_.end()) return it->second;
  return std::nullopt;
}

void Graph::add_edge(std::size_t a, std::size_t b, std::uint64_t weight) {
  if (a >= nodes_.size() || b >= nodes_.size())
    throw Error(Errc::InvalidGraph, "edge refers to a missing node");
  if (a == b) throw Error(Errc::InvalidGraph, "self-loop on " + nodes_[a].label);
  if (weight == 0) throw Error(Errc::InvalidGraph, "zero edge weight");
  if (bipartite_) {
    const auto ka = nodes_[a].kind, kb = nodes_[b].kind;
    const bool ok = (ka == NodeKind::User && kb == NodeKind::Trend) ||
                    (ka == NodeKind::Trend && kb == NodeKind::User);
    if (!ok)
      throw Error(Errc::InvalidGraph, "edge " + nodes_[a].label + " - " +
                                          nodes_[b].label + " is not user-trend");
  }
  adj_[a][b] += weight;
  adj_[b][a] += weight;
}

std::size_t Graph::edge_count() const {
  std::size_t n = 0;
  for (const auto& a : adj_) n += a.size();
  return n / 2;
}

std::uint64_t Graph::strength(std::size_t i) const {
  std::uint64_t s = 0;
  for (const auto& [j, w] : adj_.at(i)) s += w;
  return s;
}

std::uint64_t Graph::total_weight() const {
  std::uint64_t s = 0;
  for (const auto& e : edges()) s += e.weight;
  return s;
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  for (std::size_t a = 0; a < adj_.size(); ++a)
    for (const auto& [b, w] : adj_[a])
      if (a < b) out.push_back({a, b, w});
  return out;
}

Graph Graph::induced(const std::vector<bool>& keep) const {
  Graph g(bipartite_);
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (i < keep.size() && keep[i]) order.push_back(i);
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return nodes_[x] < nodes_[y]; });
  std::vector<std::size_t> remap(nodes_.size(), kUnassigned);
  for (std::size_t i : order) remap[i] = g.add_node(nodes_[i].kind, nodes_[i].label);
  for (const auto& e : edges())
    if (remap[e.a] != kUnassigned && remap[e.b] != kUnassigned)
      g.add_edge(remap[e.a], remap[e.b], e.weight);
  return g;
}

bool Graph::operator==(const Graph& o) const {
  if (bipartite_ != o.bipartite_ || nodes_.size() != o.nodes_.size()) return false;
  auto labelled = [](const Graph& g) {
    std::set<std::tuple<Node, Node, std::uint64_t>> s;
    for (const auto& e : g.edges()) {
      Node x = g.nodes_[e.a], y = g.nodes_[e.b];
      if (y < x) std::swap(x, y);
      s.emplace(std::move(x), std::move(y), e.weight);
    }
    return s;
  };
  std::set<Node> mine(nodes_.begin(), nodes_.end());
  std::set<Node> theirs(o.nodes_.begin(), o.nodes_.end());
  return mine == theirs && labelled(*this) == labelled(o);
}

Graph build_graph(std::span<const TrendInstance> instances,
                  std::span<const std::vector<TweetFlags>> flags,
                  EdgePredicate predicate) {
  if (flags.size() != instances.size())
    throw Error(Errc::InconsistentData, "flags do not align with instances");
  std::map<std::pair<std::uint64_t, std::string>, std::uint64_t> weights;
  std::set<std::uint64_t> users;
  std::set<std::string> trends;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& inst = instances[i];
    if (flags[i].size() != inst.tweets.size())
      throw Error(Errc::InconsistentData, "flags do not align with tweets");
    const std::string label = inst.trend.label();
    for (std::size_t j = 0; j < inst.tweets.size(); ++j) {
      const Tweet& t = inst.tweets[j];
      const bool deleted = inst.deletions.count(t.id) > 0;
      const bool qualifies = predicate == EdgePredicate::Undeleted
                                 ? !deleted
                                 : deleted && flags[i][j].is_lexicon;
      if (!qualifies) continue;
      ++weights[{t.user_id, label}];
      users.insert(t.user_id);
      trends.insert(label);
    }
  }
  // Numeric user order and label order give a canonical numbering that does
  // not depend on the order of the instances.
  std::vector<std::string> user_labels;
  for (auto u : users) user_labels.push_back(std::to_string(u));
  std::sort(user_labels.begin(), user_labels.end());
  Graph g(true);
  for (const auto& u : user_labels) g.add_node(NodeKind::User, u);
  for (const auto& t : trends) g.add_node(NodeKind::Trend, t);
  for (const auto& [key, w] : weights)
    g.add_edge(*g.find(NodeKind::User, std::to_string(key.first)),
               *g.find(NodeKind::Trend, key.second), w);
  return g;
}

Graph k_core(const Graph& g, std::size_t k) {
  const std::size_t n = g.node_count();
  std::vector<std::size_t> deg(n);
  std::vector<bool> alive(n, true);
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < n; ++i) {
    deg[i] = g.degree(i);
    if (deg[i] < k) {
      alive[i] = false;
      stack.push_back(i);
    }
  }
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (const auto& [u, w] : g.neighbors(v)) {
      if (!alive[u]) continue;
      if (--deg[u] < k) {
        alive[u] = false;
        stack.push_back(u);
      }
    }
  }
  return g.induced(alive);
}

Graph single_attack_filter(const Graph& g) {
  const std::size_t n = g.node_count();
  std::vector<bool> keep(n, true);
  for (std::size_t i = 0; i < n; ++i)
    if (g.node(i).kind == NodeKind::User && g.degree(i) == 1) keep[i] = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (!keep[i]) continue;
    bool linked = false;
    for (const auto& [j, w] : g.neighbors(i)) linked = linked || keep[j];
    keep[i] = linked;
  }
  return g.induced(keep);
}

std::size_t Partition::community_count() const {
  std::set<std::size_t> ids(community.begin(), community.end());
  return ids.size();
}

double modularity(const Graph& g, std::span<const std::size_t> community,
                  bool weighted) {
  const std::size_t n = g.node_count();
  if (community.size() < n)
    throw Error(Errc::IncompleteAssignment, "assignment shorter than node count");
  for (std::size_t i = 0; i < n; ++i)
    if (community[i] == kUnassigned)
      throw Error(Errc::IncompleteAssignment, "node " + g.node(i).label + " unassigned");
  double m = 0;
  std::map<std::size_t, double> in, tot;
  for (const auto& e : g.edges()) {
    const double w = weighted ? static_cast<double>(e.weight) : 1.0;
    m += w;
    tot[community[e.a]] += w;
    tot[community[e.b]] += w;
    if (community[e.a] == community[e.b]) in[community[e.a]] += 2 * w;
  }
  if (m == 0) return 0.0;
  double q = 0;
  for (const auto& [c, t] : tot) {
    const double ic = in.count(c) ? in.at(c) : 0.0;
    q += ic / (2 * m) - (t / (2 * m)) * (t / (2 * m));
  }
  return q;
}

namespace {

struct Level {
  std::vector<std::map<std::size_t, double>> adj;  // no self entries
  std::vector<double> loop;                        // internal weight, counted once
};

constexpr double kGainEps = 1e-12;

}  // namespace

Partition louvain(const Graph& g, std::uint64_t seed, bool weighted) {
  const std::size_t n0 = g.node_count();
  if (n0 == 0) throw Error(Errc::EmptyGraph, "cannot partition an empty graph");

  Level level;
  level.adj.resize(n0);
  level.loop.assign(n0, 0.0);
  double m = 0;
  for (const auto& e : g.edges()) {
    const double w = weighted ? static_cast<double>(e.weight) : 1.0;
    level.adj[e.a][e.b] += w;
    level.adj[e.b][e.a] += w;
    m += w;
  }

  std::vector<std::size_t> membership(n0);
  for (std::size_t i = 0; i < n0; ++i) membership[i] = i;

  Rng rng(seed);
  std::vector<double> in, tot;
  while (true) {
    const std::size_t n = level.adj.size();
    std::vector<double> k(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (const auto& [j, w] : level.adj[i]) k[i] += w;
      k[i] += 2 * level.loop[i];
    }
    std::vector<std::size_t> comm(n);
    in.assign(n, 0.0);
    tot.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      comm[i] = i;
      in[i] = 2 * level.loop[i];
      tot[i] = k[i];
    }
    if (m == 0) break;

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t i = n; i > 1; --i)
      std::swap(order[i - 1],
                order[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1))]);

    bool moved_any = false;
    bool moved = true;
    std::map<std::size_t, double> links;
    while (moved) {
      moved = false;
      for (std::size_t i : order) {
        const std::size_t own = comm[i];
        links.clear();
        for (const auto& [j, w] : level.adj[i]) links[comm[j]] += w;
        const double k_own = links.count(own) ? links.at(own) : 0.0;
        in[own] -= 2 * k_own + 2 * level.loop[i];
        tot[own] -= k[i];

        double best_gain = k_own - tot[own] * k[i] / (2 * m);
        std::size_t best = own;
        for (const auto& [c, kc] : links) {
          if (c == own) continue;
          const double gain = kc - tot[c] * k[i] / (2 * m);
          if (gain > best_gain + kGainEps) {
            best_gain = gain;
            best = c;
          }
        }
        const double k_best = links.count(best) ? links.at(best) : 0.0;
        in[best] += 2 * k_best + 2 * level.loop[i];
        tot[best] += k[i];
        comm[i] = best;
        if (best != own) moved = moved_any = true;
      }
    }
    if (!moved_any) break;

    // Renumber by first appearance and fold communities into single nodes.
    std::vector<std::size_t> renum(n, kUnassigned);
    std::size_t next = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (renum[comm[i]] == kUnassigned) renum[comm[i]] = next++;
    Level up;
    up.adj.resize(next);
    up.loop.assign(next, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t ci = renum[comm[i]];
      up.loop[ci] += level.loop[i];
      for (const auto& [j, w] : level.adj[i]) {
        const std::size_t cj = renum[comm[j]];
        if (ci == cj) {
          if (i < j) up.loop[ci] += w;
        } else {
          up.adj[ci][cj] += w;
        }
      }
    }
    for (auto& c : membership) c = renum[comm[c]];
    level = std::move(up);
  }

  double bookkeeping = 0;
  if (m > 0)
    for (std::size_t c = 0; c < in.size(); ++c)
      bookkeeping += in[c] / (2 * m) - (tot[c] / (2 * m)) * (tot[c] / (2 * m));

  Partition p;
  p.community.resize(n0);
  std::map<std::size_t, std::size_t> first;
  for (std::size_t i = 0; i < n0; ++i) {
    auto [it, inserted] = first.try_emplace(membership[i], first.size());
    p.community[i] = it->second;
  }
  p.modularity = modularity(g, p.community, weighted);
  if (std::abs(p.modularity - bookkeeping) > 1e-9)
    throw std::logic_error("louvain modularity bookkeeping diverged");
  return p;
}

std::map<std::uint64_t, UserActivity> user_activity(
    std::span<const TrendInstance> instances,
    std::span<const std::vector<TweetFlags>> flags) {
  if (flags.size() != instances.size())
    throw Error(Errc::InconsistentData, "flags do not align with instances");
  std::map<std::uint64_t, UserActivity> out;
  std::set<std::uint64_t> seen;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& inst = instances[i];
    for (std::size_t j = 0; j < inst.tweets.size(); ++j) {
      const Tweet& t = inst.tweets[j];
      if (!seen.insert(t.id).second) continue;
      auto& a = out[t.user_id];
      if (inst.deletions.count(t.id)) {
        if (flags[i][j].is_lexicon) a.attacks.push_back(t.created_at);
      } else if (!a.last_undeleted || *a.last_undeleted < t.created_at) {
        a.last_undeleted = t.created_at;
      }
    }
  }
  for (auto& [u, a] : out) std::sort(a.attacks.begin(), a.attacks.end());
  return out;
}

std::vector<CommunitySummary> community_summary(
    const Graph& g, const Partition& p,
    const std::map<std::uint64_t, UserActivity>& activity,
    Duration dormancy_threshold) {
  if (p.community.size() < g.node_count())
    throw Error(Errc::IncompleteAssignment, "partition does not cover the graph");
  std::map<std::size_t, CommunitySummary> by_id;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    auto& s = by_id[p.community[i]];
    s.community = p.community[i];
    const Node& node = g.node(i);
    if (node.kind == NodeKind::Trend) {
      ++s.n_trends;
      continue;
    }
    if (node.kind != NodeKind::User) continue;
    ++s.n_users;
    const std::uint64_t user = std::stoull(node.label);
    auto it = activity.find(user);
    if (it == activity.end()) continue;
    const UserActivity& a = it->second;
    for (const auto& t : a.attacks) {
      if (!s.first_seen || t < *s.first_seen) s.first_seen = t;
      if (!s.last_seen || *s.last_seen < t) s.last_seen = t;
    }
    if (!a.attacks.empty() && a.last_undeleted) {
      const Timestamp last_attack = *std::max_element(a.attacks.begin(), a.attacks.end());
      Duration gap = *a.last_undeleted - last_attack;
      if (gap.seconds < 0) gap.seconds = -gap.seconds;
      s.dormancy_gaps.push_back({user, gap, gap > dormancy_threshold});
    }
  }
  std::vector<CommunitySummary> out;
  for (auto& [id, s] : by_id) {
    std::sort(s.dormancy_gaps.begin(), s.dormancy_gaps.end(),
              [](const DormancyGap& a, const DormancyGap& b) { return a.user < b.user; });
    out.push_back(std::move(s));
  }
  return out;
}

std::size_t user_overlap(const Graph& a, const Graph& b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.node_count(); ++i)
    if (a.node(i).kind == NodeKind::User && b.find(NodeKind::User, a.node(i).label))
      ++n;
  return n;
}

void write_edges(std::ostream& out, const Graph& g) {
  csv::write_row(out, {"source", "target", "weight", "source_kind", "target_kind"});
  for (const auto& e : g.edges()) {
    const Node& x = g.node(e.a);
    const Node& y = g.node(e.b);
    csv::write_row(out, {x.label, y.label, std::to_string(e.weight),
                         std::string(node_kind_name(x.kind)),
                         std::string(node_kind_name(y.kind))});
  }
}

void write_partition(std::ostream& out, const Graph& g, const Partition& p) {
  csv::write_row(out, {"node", "community"});
  for (std::size_t i = 0; i < g.node_count(); ++i)
    csv::write_row(out, {g.node(i).label, std::to_string(p.community.at(i))});
}

void write_community_summary(std::ostream& out,
                             std::span<const CommunitySummary> summaries) {
  csv::write_row(out, {"community", "users", "trends", "first_seen", "last_seen",
                       "users_with_gap", "dormant_users"});
  for (const auto& s : summaries) {
    std::size_t dormant = 0;
    for (const auto& d : s.dormancy_gaps) dormant += d.dormant;
    csv::write_row(out, {std::to_string(s.community), std::to_string(s.n_users),
                         std::to_string(s.n_trends),
                         s.first_seen ? format_iso8601(*s.first_seen) : "",
                         s.last_seen ? format_iso8601(*s.last_seen) : "",
                         std::to_string(s.dormancy_gaps.size()),
                         std::to_string(dormant)});
  }
}

}  // namespace trendguard
