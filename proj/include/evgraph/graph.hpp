#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "evgraph/event.hpp"

namespace evgraph {

struct GraphPolicy {
  /// Missing edge endpoints are created (and announced downstream) first.
  bool auto_create = true;
  /// Violations throw GraphError; otherwise the event is skipped and counted.
  bool strict = false;
  bool allow_self_loops = false;
  bool allow_multi_edges = false;
};

class GraphError : public StreamError {
 public:
  using StreamError::StreamError;
};

struct EdgeData {
  std::string src;
  std::string dst;
  bool directed = false;
  Attrs attrs;
  friend bool operator==(const EdgeData&, const EdgeData&) = default;
};

/// Immutable copy of a graph state.
struct Snapshot {
  std::map<std::string, Attrs, std::less<>> nodes;
  std::map<std::string, EdgeData, std::less<>> edges;
  Attrs graph_attrs;
  Timestamp now = 0.0;
  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

/// In-memory dynamic graph. As a sink it applies events; as a filter it
/// forwards every applied event, plus the events a change implies:
/// endpoint creation under auto_create (before the EdgeAdded) and incident
/// edge removal when a node goes away (before the NodeRemoved).
class DynamicGraph : public Filter {
 public:
  using Reasons = std::vector<std::string>;
  using ViolationHandler = std::function<void(const Event&, const Reasons&)>;

  explicit DynamicGraph(GraphPolicy policy = {}) : policy_(policy) {}

  void consume(const Event& e) override { apply(e); }

  void apply(const Event& e) {
    Reasons reasons = check(e);
    if (!reasons.empty()) {
      if (policy_.strict) {
        std::string msg = describe(e);
        for (std::size_t i = 0; i < reasons.size(); ++i) msg += (i == 0 ? ": " : "; ") + reasons[i];
        throw GraphError(msg);
      }
      ++skipped_;
      if (on_violation_) on_violation_(e, reasons);
      return;
    }
    std::visit([this](const auto& x) { do_apply(x); }, e);
  }

  void add_node(std::string id, Attrs attrs = {}) { apply(NodeAdded{std::move(id), std::move(attrs)}); }
  void remove_node(std::string id) { apply(NodeRemoved{std::move(id)}); }
  void add_edge(std::string id, std::string src, std::string dst, bool directed = false) {
    apply(EdgeAdded{std::move(id), std::move(src), std::move(dst), directed, {}});
  }
  void remove_edge(std::string id) { apply(EdgeRemoved{std::move(id)}); }

  /// Every reason `e` cannot be applied to the current state; empty if it can.
  Reasons check(const Event& e) const {
    Reasons out;
    std::visit([&](const auto& x) { check_one(x, out); }, e);
    return out;
  }

  // Queries --------------------------------------------------------------

  const GraphPolicy& policy() const { return policy_; }
  Timestamp now() const { return now_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::size_t skipped_count() const { return skipped_; }
  bool has_node(std::string_view id) const { return nodes_.find(id) != nodes_.end(); }
  bool has_edge(std::string_view id) const { return edges_.find(id) != edges_.end(); }

  void set_violation_handler(ViolationHandler h) { on_violation_ = std::move(h); }

  /// Alive incident edges; a self-loop counts twice.
  std::size_t degree(std::string_view id) const {
    const auto& n = node(id);
    std::size_t d = 0;
    for (const auto& eid : n.incident) {
      const auto& ed = edges_.find(eid)->second;
      d += ed.src == ed.dst ? 2 : 1;
    }
    return d;
  }

  std::set<std::string> neighbors(std::string_view id) const {
    std::set<std::string> out;
    for_each_neighbor(id, [&](const std::string& other) { out.insert(other); });
    return out;
  }

  /// Calls `fn(neighbor_id)` once per incident edge, ignoring direction.
  template <class Fn>
  void for_each_neighbor(std::string_view id, Fn&& fn) const {
    const auto& n = node(id);
    for (const auto& eid : n.incident) {
      const auto& ed = edges_.find(eid)->second;
      fn(ed.src == id ? ed.dst : ed.src);
    }
  }

  const std::set<std::string, std::less<>>& incident_edges(std::string_view id) const {
    return node(id).incident;
  }

  const Attrs& node_attrs(std::string_view id) const { return node(id).attrs; }

  const EdgeData& edge(std::string_view id) const {
    auto it = edges_.find(id);
    if (it == edges_.end()) throw std::out_of_range("unknown edge '" + std::string(id) + "'");
    return it->second;
  }

  const Attrs& graph_attrs() const { return graph_attrs_; }

  std::vector<std::string> node_ids() const {
    std::vector<std::string> ids;
    ids.reserve(nodes_.size());
    for (const auto& [id, n] : nodes_) ids.push_back(id);
    return ids;
  }

  const std::map<std::string, EdgeData, std::less<>>& edges() const { return edges_; }

  Snapshot snapshot() const {
    Snapshot s;
    for (const auto& [id, n] : nodes_) s.nodes.emplace(id, n.attrs);
    s.edges = edges_;
    s.graph_attrs = graph_attrs_;
    s.now = now_;
    return s;
  }

 private:
  struct NodeRec {
    Attrs attrs;
    std::set<std::string, std::less<>> incident;
  };

  using PairKey = std::pair<std::string, std::string>;

  static PairKey pair_key(const std::string& a, const std::string& b) {
    return a < b ? PairKey{a, b} : PairKey{b, a};
  }

  const NodeRec& node(std::string_view id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw std::out_of_range("unknown node '" + std::string(id) + "'");
    return it->second;
  }

  static void check_attrs(const Attrs& attrs, Reasons& out) {
    for (const auto& [k, v] : attrs) {
      if (!is_valid_identifier(k)) out.push_back("malformed attribute key '" + k + "'");
      if (!is_finite_value(v)) out.push_back("non-finite number in attribute '" + k + "'");
    }
  }

  static void check_change(const std::string& key, const std::optional<AttrValue>& v,
                           Reasons& out) {
    if (!is_valid_identifier(key)) out.push_back("malformed attribute key '" + key + "'");
    if (v && !is_finite_value(*v)) out.push_back("non-finite number in attribute '" + key + "'");
  }

  void check_one(const NodeAdded& x, Reasons& out) const {
    if (!is_valid_identifier(x.id)) out.push_back("malformed identifier '" + x.id + "'");
    if (has_node(x.id)) out.push_back("node '" + x.id + "' already exists");
    check_attrs(x.attrs, out);
  }

  void check_one(const NodeRemoved& x, Reasons& out) const {
    if (!has_node(x.id)) out.push_back("node '" + x.id + "' does not exist");
  }

  void check_one(const EdgeAdded& x, Reasons& out) const {
    for (const auto* id : {&x.id, &x.src, &x.dst})
      if (!is_valid_identifier(*id)) out.push_back("malformed identifier '" + *id + "'");
    if (has_edge(x.id)) out.push_back("edge '" + x.id + "' already exists");
    if (x.src == x.id || x.dst == x.id)
      out.push_back("edge '" + x.id + "' uses its own id as an endpoint");
    if (!policy_.auto_create) {
      if (!has_node(x.src)) out.push_back("endpoint '" + x.src + "' does not exist");
      if (x.dst != x.src && !has_node(x.dst))
        out.push_back("endpoint '" + x.dst + "' does not exist");
    }
    if (x.src == x.dst && !policy_.allow_self_loops) out.push_back("self-loop on '" + x.src + "'");
    if (!policy_.allow_multi_edges && pairs_.count(pair_key(x.src, x.dst)) != 0)
      out.push_back("an edge between '" + x.src + "' and '" + x.dst + "' already exists");
    check_attrs(x.attrs, out);
  }

  void check_one(const EdgeRemoved& x, Reasons& out) const {
    if (!has_edge(x.id)) out.push_back("edge '" + x.id + "' does not exist");
  }

  void check_one(const NodeAttrChanged& x, Reasons& out) const {
    if (!has_node(x.id)) out.push_back("node '" + x.id + "' does not exist");
    check_change(x.key, x.value, out);
  }

  void check_one(const EdgeAttrChanged& x, Reasons& out) const {
    if (!has_edge(x.id)) out.push_back("edge '" + x.id + "' does not exist");
    check_change(x.key, x.value, out);
  }

  void check_one(const GraphAttrChanged& x, Reasons& out) const {
    check_change(x.key, x.value, out);
  }

  void check_one(const StepBegins& x, Reasons& out) const {
    if (!std::isfinite(x.time) || x.time < 0)
      out.push_back("step time must be finite and non-negative");
    else if (x.time < now_)
      out.push_back("step time " + format_number(x.time) + " precedes current time " +
                    format_number(now_));
  }

  static void set_attr(Attrs& attrs, const std::string& key, const std::optional<AttrValue>& v) {
    if (v)
      attrs.insert_or_assign(key, *v);
    else
      attrs.erase(key);
  }

  void do_apply(const NodeAdded& x) {
    nodes_.emplace(x.id, NodeRec{x.attrs, {}});
    emit(x);
  }

  void do_apply(const NodeRemoved& x) {
    auto it = nodes_.find(x.id);
    // Copy: erase_edge mutates the incident set.
    const std::vector<std::string> incident(it->second.incident.begin(), it->second.incident.end());
    for (const auto& eid : incident) {
      erase_edge(eid);
      emit(EdgeRemoved{eid});
    }
    nodes_.erase(x.id);
    emit(x);
  }

  void do_apply(const EdgeAdded& x) {
    if (!has_node(x.src)) do_apply(NodeAdded{x.src, {}});
    if (!has_node(x.dst)) do_apply(NodeAdded{x.dst, {}});
    edges_.emplace(x.id, EdgeData{x.src, x.dst, x.directed, x.attrs});
    nodes_.find(x.src)->second.incident.insert(x.id);
    nodes_.find(x.dst)->second.incident.insert(x.id);
    ++pairs_[pair_key(x.src, x.dst)];
    emit(x);
  }

  void do_apply(const EdgeRemoved& x) {
    erase_edge(x.id);
    emit(x);
  }

  void do_apply(const NodeAttrChanged& x) {
    set_attr(nodes_.find(x.id)->second.attrs, x.key, x.value);
    emit(x);
  }

  void do_apply(const EdgeAttrChanged& x) {
    set_attr(edges_.find(x.id)->second.attrs, x.key, x.value);
    emit(x);
  }

  void do_apply(const GraphAttrChanged& x) {
    set_attr(graph_attrs_, x.key, x.value);
    emit(x);
  }

  void do_apply(const StepBegins& x) {
    now_ = x.time;
    emit(x);
  }

  void erase_edge(const std::string& eid) {
    auto it = edges_.find(eid);
    const EdgeData& ed = it->second;
    nodes_.find(ed.src)->second.incident.erase(eid);
    nodes_.find(ed.dst)->second.incident.erase(eid);
    auto pit = pairs_.find(pair_key(ed.src, ed.dst));
    if (--pit->second == 0) pairs_.erase(pit);
    edges_.erase(it);
  }

  GraphPolicy policy_;
  std::map<std::string, NodeRec, std::less<>> nodes_;
  std::map<std::string, EdgeData, std::less<>> edges_;
  std::map<PairKey, std::size_t> pairs_;
  Attrs graph_attrs_;
  Timestamp now_ = 0.0;
  std::size_t skipped_ = 0;
  ViolationHandler on_violation_;
};

struct Violation {
  std::size_t index;  // position of the offending event in the input
  std::string reason;
  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Every event that the graph would reject under `policy`, in order. Empty
/// means the stream replays cleanly in strict mode.
inline std::vector<Violation> validate_stream(std::span<const Event> events, GraphPolicy policy) {
  policy.strict = false;
  DynamicGraph g(policy);
  std::vector<Violation> out;
  std::size_t index = 0;
  g.set_violation_handler([&](const Event& e, const DynamicGraph::Reasons& reasons) {
    for (const auto& r : reasons) out.push_back({index, describe(e) + ": " + r});
  });
  for (; index < events.size(); ++index) g.apply(events[index]);
  return out;
}

inline std::vector<Violation> validate_stream(std::span<const Event> events, bool auto_create) {
  GraphPolicy policy;
  policy.auto_create = auto_create;
  return validate_stream(events, policy);
}

}  // namespace evgraph
