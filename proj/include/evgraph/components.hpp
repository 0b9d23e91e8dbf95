#pragma once

#include <cstddef>
#include <deque>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "evgraph/graph.hpp"

namespace evgraph {

/// Tracks the connected-component count of a DynamicGraph without
/// recomputing it from scratch.
///
/// Place it downstream of the graph it watches: by the time an event
/// arrives here, the graph already reflects it. Additions merge labels
/// (smaller component relabelled into the larger). A removed edge triggers
/// an interleaved search from both endpoints that stops as soon as the two
/// searches meet or one side runs out, so a split costs time proportional
/// to the smaller side.
class ComponentTracker : public Filter {
 public:
  using Label = std::size_t;

  explicit ComponentTracker(const DynamicGraph& g) : g_(g) {
    for (const auto& [eid, ed] : g_.edges()) edges_[eid] = {ed.src, ed.dst};
    for (const auto& id : g_.node_ids()) {
      if (label_.count(id)) continue;
      const Label l = fresh_label();
      std::deque<std::string> queue{id};
      label_[id] = l;
      members_[l].insert(id);
      while (!queue.empty()) {
        const std::string u = std::move(queue.front());
        queue.pop_front();
        g_.for_each_neighbor(u, [&](const std::string& v) {
          if (label_.emplace(v, l).second) {
            members_[l].insert(v);
            queue.push_back(v);
          }
        });
      }
    }
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

  std::size_t count() const { return members_.size(); }

  bool connected(const std::string& a, const std::string& b) const {
    return label_of(a) == label_of(b);
  }

  Label label_of(const std::string& id) const {
    auto it = label_.find(id);
    if (it == label_.end()) throw std::logic_error("component tracker out of sync: unknown node '" + id + "'");
    return it->second;
  }

  std::size_t component_size(const std::string& id) const { return members_.at(label_of(id)).size(); }

 private:
  Label fresh_label() { return next_label_++; }

  [[noreturn]] void out_of_sync(const std::string& what) const {
    throw std::logic_error("component tracker out of sync: " + what);
  }

  void on_node_added(const std::string& id) {
    if (label_.count(id)) out_of_sync("node '" + id + "' added twice");
    const Label l = fresh_label();
    label_[id] = l;
    members_[l].insert(id);
  }

  // Incident edges were already removed (the graph announces them first).
  void on_node_removed(const std::string& id) {
    const Label l = label_of(id);
    auto& m = members_[l];
    if (m.size() != 1) out_of_sync("node '" + id + "' removed while still connected");
    members_.erase(l);
    label_.erase(id);
  }

  void on_edge_added(const std::string& eid, const std::string& a, const std::string& b) {
    edges_[eid] = {a, b};
    Label la = label_of(a);
    Label lb = label_of(b);
    if (la == lb) return;
    if (members_[la].size() < members_[lb].size()) std::swap(la, lb);
    auto& big = members_[la];
    for (const auto& id : members_[lb]) {
      label_[id] = la;
      big.insert(id);
    }
    members_.erase(lb);
  }

  // The graph has already dropped the edge, so endpoints come from our copy.
  void on_edge_removed(const std::string& eid) {
    auto it = edges_.find(eid);
    if (it == edges_.end()) out_of_sync("unknown edge '" + eid + "' removed");
    auto [a, b] = std::move(it->second);
    edges_.erase(it);
    split_if_disconnected(a, b);
  }

  void split_if_disconnected(const std::string& a, const std::string& b) {
    if (a == b) return;
    const Label l = label_of(a);
    if (label_of(b) != l) out_of_sync("removed edge joined two components");

    // Interleaved breadth-first search; expand one node per side per turn.
    struct Side {
      std::deque<std::string> queue;
      std::unordered_set<std::string> seen;
    };
    Side sides[2];
    sides[0].queue.push_back(a);
    sides[0].seen.insert(a);
    sides[1].queue.push_back(b);
    sides[1].seen.insert(b);

    int exhausted = -1;
    for (int turn = 0;; turn ^= 1) {
      Side& me = sides[turn];
      const Side& other = sides[turn ^ 1];
      if (me.queue.empty()) {
        exhausted = turn;
        break;
      }
      const std::string u = std::move(me.queue.front());
      me.queue.pop_front();
      bool met = false;
      g_.for_each_neighbor(u, [&](const std::string& v) {
        if (met) return;
        if (other.seen.count(v)) {
          met = true;
          return;
        }
        if (me.seen.insert(v).second) me.queue.push_back(v);
      });
      if (met) return;
    }

    // The exhausted side is a whole component now; give it a new label.
    const Label fresh = fresh_label();
    auto& old_members = members_[l];
    auto& new_members = members_[fresh];
    for (const auto& id : sides[exhausted].seen) {
      old_members.erase(id);
      new_members.insert(id);
      label_[id] = fresh;
    }
  }

  const DynamicGraph& g_;
  std::unordered_map<std::string, Label> label_;
  std::unordered_map<Label, std::unordered_set<std::string>> members_;
  std::unordered_map<std::string, std::pair<std::string, std::string>> edges_;
  Label next_label_ = 0;
};

}  // namespace evgraph
