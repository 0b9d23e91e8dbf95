#pragma once

// Token-based spanning forest maintenance on a dynamic graph.
//
// Each tree of the forest holds exactly one token (its root). Reactions to
// topology changes:
//   - a tree edge disappears: the tree splits and the endpoint on the
//     tokenless side creates a token on itself; the other endpoint only
//     drops the adjacency.
// And in every round (step()):
//   - every token moves to a uniformly chosen tree neighbor of its holder;
//   - then any two token holders joined by a graph edge merge their trees
//     through that edge, and the larger node id gives up its token.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "evgraph/graph.hpp"
#include "evgraph/rng.hpp"

namespace evgraph {

struct TreeMetrics {
  std::map<std::size_t, std::size_t> size_histogram;  // tree size -> number of trees
  std::map<std::size_t, double> avg_diameter_by_size;
  std::map<std::size_t, double> avg_inner_degree_by_size;  // 0 when no inner nodes
  friend bool operator==(const TreeMetrics&, const TreeMetrics&) = default;
};

/// Longest shortest path (in hops) of the tree containing `start`, by a
/// double breadth-first sweep. `for_each_neighbor(node, fn)` enumerates tree
/// neighbors. Exact on trees only.
template <class NodeId, class NeighborFn>
std::size_t tree_diameter(const NodeId& start, NeighborFn&& for_each_neighbor) {
  auto farthest = [&](const NodeId& from) {
    std::map<NodeId, std::size_t> dist{{from, 0}};
    std::deque<NodeId> queue{from};
    std::pair<NodeId, std::size_t> best{from, 0};
    while (!queue.empty()) {
      NodeId u = queue.front();
      queue.pop_front();
      const std::size_t du = dist[u];
      if (du > best.second) best = {u, du};
      for_each_neighbor(u, [&](const NodeId& v) {
        if (dist.emplace(v, du + 1).second) queue.push_back(v);
      });
    }
    return best;
  };
  return farthest(farthest(start).first).second;
}

class SpanningForest : public Filter {
 public:
  struct NodeState {
    bool has_token = true;
    std::map<std::string, std::string> tree_neighbors;  // neighbor -> tree edge id
    friend bool operator==(const NodeState&, const NodeState&) = default;
  };

  struct EdgeState {
    std::string a;
    std::string b;
    bool in_tree = false;
    friend bool operator==(const EdgeState&, const EdgeState&) = default;
  };

  /// Every alive node starts as a one-node tree holding its own token; no
  /// edge is a tree edge.
  SpanningForest(const DynamicGraph& g, std::uint64_t seed) : rng_(seed) {
    for (const auto& id : g.node_ids()) nodes_.emplace(id, NodeState{});
    for (const auto& [eid, ed] : g.edges()) edges_.emplace(eid, EdgeState{ed.src, ed.dst, false});
  }

  void consume(const Event& e) override {
    std::visit(overloaded{
                   [this](const NodeAdded& x) { on_node_added(x.id); },
                   [this](const NodeRemoved& x) { on_node_removed(x.id); },
                   [this](const EdgeAdded& x) { on_edge_added(x.id, x.src, x.dst); },
                   [this](const EdgeRemoved& x) { on_edge_removed(x.id); },
                   [](const auto&) {},
               },
               e);
    emit(e);
  }

  void on_node_added(const std::string& id) {
    if (!nodes_.emplace(id, NodeState{}).second)
      throw std::logic_error("spanning forest: node '" + id + "' already present");
  }

  // Incident edges have been removed already, so the node is a lone tree.
  void on_node_removed(const std::string& id) {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw std::logic_error("spanning forest: unknown node '" + id + "'");
    if (!it->second.tree_neighbors.empty())
      throw std::logic_error("spanning forest: node '" + id + "' removed with tree edges");
    nodes_.erase(it);
  }

  /// Records a non-tree edge. Merging happens in the next step().
  void on_edge_added(const std::string& eid, const std::string& a, const std::string& b) {
    if (!nodes_.count(a) || !nodes_.count(b))
      throw std::logic_error("spanning forest: edge '" + eid + "' has unknown endpoints");
    if (!edges_.emplace(eid, EdgeState{a, b, false}).second)
      throw std::logic_error("spanning forest: edge '" + eid + "' already present");
  }

  void on_edge_removed(const std::string& eid) {
    auto it = edges_.find(eid);
    if (it == edges_.end()) throw std::logic_error("spanning forest: unknown edge '" + eid + "'");
    const EdgeState es = std::move(it->second);
    edges_.erase(it);
    if (!es.in_tree) return;

    NodeState& na = nodes_.at(es.a);
    NodeState& nb = nodes_.at(es.b);
    na.tree_neighbors.erase(es.b);
    nb.tree_neighbors.erase(es.a);
    // Exactly one of the two halves still holds the old root.
    if (!tree_has_token(es.a))
      na.has_token = true;
    else if (!tree_has_token(es.b))
      nb.has_token = true;
  }

  /// One synchronous round: move_tokens() then merge_tokens().
  void step() {
    move_tokens();
    merge_tokens();
  }

  /// Every token hops to a uniformly random tree neighbor of its holder.
  void move_tokens() {
    std::vector<std::string> holders;
    for (const auto& [id, ns] : nodes_)
      if (ns.has_token) holders.push_back(id);
    for (const auto& id : holders) {
      NodeState& ns = nodes_.at(id);
      if (ns.tree_neighbors.empty()) continue;
      auto it = ns.tree_neighbors.begin();
      std::advance(it, static_cast<std::ptrdiff_t>(rng_.below(ns.tree_neighbors.size())));
      ns.has_token = false;
      nodes_.at(it->first).has_token = true;
    }
  }

  /// Scans edges in id order; two token holders joined by a non-tree edge
  /// merge their trees through it and the larger id loses its token.
  void merge_tokens() {
    for (auto& [eid, es] : edges_) {
      if (es.in_tree || es.a == es.b) continue;
      NodeState& na = nodes_.at(es.a);
      NodeState& nb = nodes_.at(es.b);
      if (!na.has_token || !nb.has_token) continue;
      es.in_tree = true;
      na.tree_neighbors.emplace(es.b, eid);
      nb.tree_neighbors.emplace(es.a, eid);
      (es.a < es.b ? nb : na).has_token = false;
    }
  }

  // Queries ----------------------------------------------------------------

  bool has_token(const std::string& id) const { return nodes_.at(id).has_token; }
  bool in_tree(const std::string& eid) const { return edges_.at(eid).in_tree; }
  const std::map<std::string, NodeState>& nodes() const { return nodes_; }
  const std::map<std::string, EdgeState>& edges() const { return edges_; }

  std::size_t token_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const auto& kv) { return kv.second.has_token; }));
  }

  std::size_t tree_edge_count() const {
    return static_cast<std::size_t>(
        std::count_if(edges_.begin(), edges_.end(), [](const auto& kv) { return kv.second.in_tree; }));
  }

  /// Trees as sorted member lists, ordered by smallest member.
  std::vector<std::vector<std::string>> trees() const {
    std::vector<std::vector<std::string>> out;
    std::set<std::string> seen;
    for (const auto& [id, ns] : nodes_) {
      if (seen.count(id)) continue;
      std::vector<std::string> members = tree_of(id);
      for (const auto& m : members) seen.insert(m);
      std::sort(members.begin(), members.end());
      out.push_back(std::move(members));
    }
    return out;
  }

  std::vector<std::string> tree_of(const std::string& start) const {
    std::vector<std::string> members{start};
    std::set<std::string> seen{start};
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (const auto& [v, eid] : nodes_.at(members[i]).tree_neighbors)
        if (seen.insert(v).second) members.push_back(v);
    }
    return members;
  }

  TreeMetrics metrics() const {
    struct Acc {
      std::size_t trees = 0;
      std::size_t diameter_sum = 0;
      std::size_t inner_nodes = 0;
      std::size_t inner_degree_sum = 0;
    };
    std::map<std::size_t, Acc> by_size;
    auto neighbors = [this](const std::string& u, auto&& fn) {
      for (const auto& [v, eid] : nodes_.at(u).tree_neighbors) fn(v);
    };
    for (const auto& members : trees()) {
      Acc& acc = by_size[members.size()];
      ++acc.trees;
      acc.diameter_sum += tree_diameter(members.front(), neighbors);
      for (const auto& m : members) {
        const std::size_t d = nodes_.at(m).tree_neighbors.size();
        if (d >= 2) {
          ++acc.inner_nodes;
          acc.inner_degree_sum += d;
        }
      }
    }
    TreeMetrics tm;
    for (const auto& [size, acc] : by_size) {
      tm.size_histogram[size] = acc.trees;
      tm.avg_diameter_by_size[size] =
          static_cast<double>(acc.diameter_sum) / static_cast<double>(acc.trees);
      tm.avg_inner_degree_by_size[size] =
          acc.inner_nodes == 0
              ? 0.0
              : static_cast<double>(acc.inner_degree_sum) / static_cast<double>(acc.inner_nodes);
    }
    return tm;
  }

  friend bool operator==(const SpanningForest& x, const SpanningForest& y) {
    return x.nodes_ == y.nodes_ && x.edges_ == y.edges_ && x.rng_ == y.rng_;
  }

 private:
  bool tree_has_token(const std::string& start) const {
    for (const auto& id : tree_of(start))
      if (nodes_.at(id).has_token) return true;
    return false;
  }

  std::map<std::string, NodeState> nodes_;
  std::map<std::string, EdgeState> edges_;
  SplitMix64 rng_;
};

inline TreeMetrics tree_metrics(const SpanningForest& f) { return f.metrics(); }

/// Structural checks of a forest against the graph it follows. Returns one
/// message per violated property; empty means all hold.
inline std::vector<std::string> check_forest(const SpanningForest& f, const DynamicGraph& g) {
  std::vector<std::string> problems;

  if (f.nodes().size() != g.node_count())
    problems.push_back("forest tracks " + std::to_string(f.nodes().size()) + " nodes, graph has " +
                       std::to_string(g.node_count()));
  for (const auto& [id, ns] : f.nodes())
    if (!g.has_node(id)) problems.push_back("forest node '" + id + "' not in graph");
  if (f.edges().size() != g.edge_count())
    problems.push_back("forest tracks " + std::to_string(f.edges().size()) + " edges, graph has " +
                       std::to_string(g.edge_count()));

  // Adjacency must mirror in_tree edges exactly, and symmetrically.
  std::size_t adjacency_entries = 0;
  for (const auto& [id, ns] : f.nodes()) {
    for (const auto& [v, eid] : ns.tree_neighbors) {
      ++adjacency_entries;
      auto it = f.edges().find(eid);
      if (it == f.edges().end() || !it->second.in_tree) {
        problems.push_back("tree adjacency " + id + "-" + v + " has no tree edge");
        continue;
      }
      const auto& es = it->second;
      if (!((es.a == id && es.b == v) || (es.a == v && es.b == id)))
        problems.push_back("tree adjacency " + id + "-" + v + " mismatches edge '" + eid + "'");
      auto vit = f.nodes().find(v);
      if (vit == f.nodes().end() || vit->second.tree_neighbors.count(id) == 0)
        problems.push_back("tree adjacency " + id + "-" + v + " is not symmetric");
    }
  }
  if (adjacency_entries != 2 * f.tree_edge_count())
    problems.push_back("tree edge count does not match adjacency");

  // Acyclic: each tree with s nodes has s-1 edges. One token per tree. A
  // tree lives inside one graph component (checked by walking graph edges).
  std::size_t node_total = 0;
  const auto trees = f.trees();
  for (const auto& members : trees) {
    node_total += members.size();
    std::size_t tokens = 0;
    for (const auto& m : members) tokens += f.nodes().at(m).has_token ? 1 : 0;
    if (tokens != 1)
      problems.push_back("tree containing '" + members.front() + "' has " + std::to_string(tokens) +
                         " tokens");
    for (const auto& m : members) {
      for (const auto& [v, eid] : f.nodes().at(m).tree_neighbors)
        if (!g.has_edge(eid)) problems.push_back("tree edge '" + eid + "' is not a graph edge");
    }
  }
  if (node_total != f.nodes().size()) problems.push_back("a node belongs to several trees");
  if (f.tree_edge_count() + trees.size() != f.nodes().size())
    problems.push_back("tree edges contain a cycle");
  return problems;
}

}  // namespace evgraph
