#pragma once

// Event vocabulary for dynamic graphs and the source -> filter -> sink
// pipeline contract.

#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

namespace evgraph {

/// Abstract time units. Discrete-time streams use integral values.
using Timestamp = double;

/// A node, edge or graph attribute value: number, string, boolean or a list
/// of further values.
struct AttrValue {
  using List = std::vector<AttrValue>;
  std::variant<double, std::string, bool, List> data;

  AttrValue() : data(0.0) {}
  AttrValue(double d) : data(d) {}
  AttrValue(int i) : data(static_cast<double>(i)) {}
  AttrValue(bool b) : data(b) {}
  AttrValue(std::string s) : data(std::move(s)) {}
  AttrValue(const char* s) : data(std::string(s)) {}
  AttrValue(List l) : data(std::move(l)) {}

  bool is_number() const { return std::holds_alternative<double>(data); }
  bool is_string() const { return std::holds_alternative<std::string>(data); }
  bool is_bool() const { return std::holds_alternative<bool>(data); }
  bool is_list() const { return std::holds_alternative<List>(data); }

  double as_number() const { return std::get<double>(data); }
  const std::string& as_string() const { return std::get<std::string>(data); }
  bool as_bool() const { return std::get<bool>(data); }
  const List& as_list() const { return std::get<List>(data); }

  friend bool operator==(const AttrValue&, const AttrValue&) = default;
};

using Attrs = std::map<std::string, AttrValue, std::less<>>;

struct NodeAdded {
  std::string id;
  Attrs attrs;
  friend bool operator==(const NodeAdded&, const NodeAdded&) = default;
};

struct NodeRemoved {
  std::string id;
  friend bool operator==(const NodeRemoved&, const NodeRemoved&) = default;
};

struct EdgeAdded {
  std::string id;
  std::string src;
  std::string dst;
  bool directed = false;
  Attrs attrs;
  friend bool operator==(const EdgeAdded&, const EdgeAdded&) = default;
};

struct EdgeRemoved {
  std::string id;
  friend bool operator==(const EdgeRemoved&, const EdgeRemoved&) = default;
};

// An absent value removes the attribute.
struct NodeAttrChanged {
  std::string id;
  std::string key;
  std::optional<AttrValue> value;
  friend bool operator==(const NodeAttrChanged&, const NodeAttrChanged&) = default;
};

struct EdgeAttrChanged {
  std::string id;
  std::string key;
  std::optional<AttrValue> value;
  friend bool operator==(const EdgeAttrChanged&, const EdgeAttrChanged&) = default;
};

struct GraphAttrChanged {
  std::string key;
  std::optional<AttrValue> value;
  friend bool operator==(const GraphAttrChanged&, const GraphAttrChanged&) = default;
};

struct StepBegins {
  Timestamp time = 0.0;
  friend bool operator==(const StepBegins&, const StepBegins&) = default;
};

using Event = std::variant<NodeAdded, NodeRemoved, EdgeAdded, EdgeRemoved,
                           NodeAttrChanged, EdgeAttrChanged, GraphAttrChanged,
                           StepBegins>;

using EventList = std::vector<Event>;

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

/// Identifiers are non-empty and contain no whitespace, '"', '#' or '='.
inline bool is_valid_identifier(std::string_view id) {
  if (id.empty()) return false;
  for (char c : id) {
    switch (c) {
      case ' ': case '\t': case '\n': case '\r': case '\v': case '\f':
      case '"': case '#': case '=':
        return false;
      default:
        break;
    }
  }
  return true;
}

/// Shortest decimal text that parses back to exactly `d`.
inline std::string format_number(double d) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, d);
  return std::string(buf, res.ptr);
}

inline bool is_finite_value(const AttrValue& v) {
  if (v.is_number()) return std::isfinite(v.as_number());
  if (v.is_list()) {
    for (const auto& item : v.as_list())
      if (!is_finite_value(item)) return false;
  }
  return true;
}

/// Short human-readable rendering of an event, used in diagnostics.
inline std::string describe(const Event& e) {
  return std::visit(
      overloaded{
          [](const NodeAdded& x) { return "NodeAdded(" + x.id + ")"; },
          [](const NodeRemoved& x) { return "NodeRemoved(" + x.id + ")"; },
          [](const EdgeAdded& x) {
            return "EdgeAdded(" + x.id + ", " + x.src + (x.directed ? " -> " : " -- ") +
                   x.dst + ")";
          },
          [](const EdgeRemoved& x) { return "EdgeRemoved(" + x.id + ")"; },
          [](const NodeAttrChanged& x) { return "NodeAttrChanged(" + x.id + "." + x.key + ")"; },
          [](const EdgeAttrChanged& x) { return "EdgeAttrChanged(" + x.id + "." + x.key + ")"; },
          [](const GraphAttrChanged& x) { return "GraphAttrChanged(" + x.key + ")"; },
          [](const StepBegins& x) { return "StepBegins(" + format_number(x.time) + ")"; },
      },
      e);
}

/// Raised by a stage to abort the pipeline it runs in.
class StreamError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Pipeline stages

/// Consumes one event at a time, in stream order.
class Sink {
 public:
  virtual ~Sink() = default;
  virtual void consume(const Event& e) = 0;
};

/// A sink that re-emits (possibly transformed) events to an optional
/// downstream sink. The default behavior forwards everything unchanged.
class Filter : public Sink {
 public:
  void set_downstream(Sink* next) { downstream_ = next; }
  Sink* downstream() const { return downstream_; }

  void consume(const Event& e) override { emit(e); }

 protected:
  void emit(const Event& e) {
    if (downstream_ != nullptr) downstream_->consume(e);
  }

 private:
  Sink* downstream_ = nullptr;
};

/// Produces a finite stream into a sink.
class Source {
 public:
  virtual ~Source() = default;
  virtual void run(Sink& out) = 0;
};

class ListSource : public Source {
 public:
  explicit ListSource(std::span<const Event> events) : events_(events) {}
  void run(Sink& out) override {
    for (const auto& e : events_) out.consume(e);
  }

 private:
  std::span<const Event> events_;
};

class Collector : public Sink {
 public:
  void consume(const Event& e) override { events.push_back(e); }
  EventList events;
};

class CountingSink : public Sink {
 public:
  void consume(const Event& e) override {
    ++total;
    ++by_kind[e.index()];
  }
  std::size_t total = 0;
  std::size_t by_kind[std::variant_size_v<Event>] = {};
};

/// Wraps a callable as a filter. The callable receives each event and an
/// `emit` function; events it does not emit are dropped.
template <class Fn>
class FunctionFilter : public Filter {
 public:
  explicit FunctionFilter(Fn fn) : fn_(std::move(fn)) {}
  void consume(const Event& e) override {
    fn_(e, [this](const Event& out) { emit(out); });
  }

 private:
  Fn fn_;
};

/// Strips every attribute: attribute maps on added elements are cleared and
/// attribute-change events are dropped.
class DropAttributesFilter : public Filter {
 public:
  void consume(const Event& e) override {
    std::visit(overloaded{
                   [this](const NodeAdded& x) { emit(NodeAdded{x.id, {}}); },
                   [this](const EdgeAdded& x) {
                     emit(EdgeAdded{x.id, x.src, x.dst, x.directed, {}});
                   },
                   [](const NodeAttrChanged&) {},
                   [](const EdgeAttrChanged&) {},
                   [](const GraphAttrChanged&) {},
                   [this, &e](const auto&) { emit(e); },
               },
               e);
  }
};

/// Runs `source` through `stages` in order and into `sink`. Any exception
/// thrown by a stage stops the pipe and propagates to the caller.
inline void pipe(Source& source, std::span<Filter* const> stages, Sink& sink) {
  Sink* head = &sink;
  for (auto it = stages.rbegin(); it != stages.rend(); ++it) {
    (*it)->set_downstream(head);
    head = *it;
  }
  source.run(*head);
}

inline void pipe(Source& source, std::initializer_list<Filter*> stages, Sink& sink) {
  pipe(source, std::span<Filter* const>(stages.begin(), stages.size()), sink);
}

inline void pipe(Source& source, Sink& sink) { source.run(sink); }

}  // namespace evgraph
