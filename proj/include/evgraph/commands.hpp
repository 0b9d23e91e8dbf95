#pragma once

// Implementations behind the `evgraph` command-line tool. Each command takes
// its streams explicitly and returns a process exit status.

#include <cstddef>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "evgraph/components.hpp"
#include "evgraph/dgs.hpp"
#include "evgraph/generators.hpp"
#include "evgraph/graph.hpp"
#include "evgraph/mobility.hpp"
#include "evgraph/render.hpp"
#include "evgraph/spanning_forest.hpp"

namespace evgraph::cli {

enum ExitStatus : int { kOk = 0, kUsage = 1, kInput = 2, kInvariant = 3 };

class InvariantViolation : public StreamError {
 public:
  using StreamError::StreamError;
};

/// Calls `on_step_end(time)` whenever a step group is complete: just before
/// the next StepBegins, and at end of stream. Events ahead of the first
/// StepBegins form a group at time 0.
class StepGroups : public Filter {
 public:
  using Callback = std::function<void(Timestamp)>;
  explicit StepGroups(Callback on_step_end) : on_step_end_(std::move(on_step_end)) {}

  void consume(const Event& e) override {
    if (const auto* st = std::get_if<StepBegins>(&e)) {
      close();
      open_ = true;
      current_ = st->time;
    } else if (!open_) {
      open_ = true;
      current_ = 0.0;
    }
    emit(e);
  }

  void close() {
    if (!open_) return;
    open_ = false;
    on_step_end_(current_);
  }

 private:
  Callback on_step_end_;
  bool open_ = false;
  Timestamp current_ = 0.0;
};

namespace detail {

// Runs `body`, mapping library exceptions to exit statuses. `reader` (if
// given) supplies the current line number for validation errors.
template <class Body>
int guarded(std::ostream& err, const DgsReader* reader, Body&& body) {
  try {
    body();
    return kOk;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInput;
  } catch (const GraphError& e) {
    err << "error: ";
    if (reader != nullptr) err << "line " << reader->line() << ": ";
    err << e.what() << '\n';
    return kInput;
  } catch (const InvariantViolation& e) {
    err << "error: invariant violated: " << e.what() << '\n';
    return kInvariant;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::logic_error& e) {
    err << "error: invariant violated: " << e.what() << '\n';
    return kInvariant;
  }
}

// Drives sf rounds after every step group and checks forest invariants.
class ForestDriver {
 public:
  ForestDriver(DynamicGraph& g, ComponentTracker& cc, SpanningForest& forest, std::size_t rounds,
               std::ostream* csv)
      : g_(g), cc_(cc), forest_(forest), rounds_(rounds), csv_(csv) {
    if (csv_ != nullptr) *csv_ << "step,tree_size,tree_count,avg_diameter,avg_inner_degree\n";
  }

  void on_step_end(Timestamp t) {
    for (std::size_t i = 0; i < rounds_; ++i) forest_.step();
    ++steps_;
    auto problems = check_forest(forest_, g_);
    for (const auto& members : forest_.trees())
      for (const auto& m : members)
        if (!cc_.connected(members.front(), m))
          problems.push_back("tree containing '" + members.front() + "' spans two components");
    if (!problems.empty()) throw InvariantViolation("step " + format_number(t) + ": " + problems.front());
    if (csv_ == nullptr) return;
    const TreeMetrics tm = forest_.metrics();
    for (const auto& [size, count] : tm.size_histogram) {
      *csv_ << format_number(t) << ',' << size << ',' << count << ','
            << format_number(tm.avg_diameter_by_size.at(size)) << ','
            << format_number(tm.avg_inner_degree_by_size.at(size)) << '\n';
    }
  }

  std::size_t steps() const { return steps_; }

 private:
  DynamicGraph& g_;
  ComponentTracker& cc_;
  SpanningForest& forest_;
  std::size_t rounds_;
  std::ostream* csv_;
  std::size_t steps_ = 0;
};

}  // namespace detail

inline int cmd_generate(const GeneratorSpec& spec, const std::string& name, std::ostream& out,
                        std::ostream& err) {
  EventList events;
  try {
    events = generate(spec);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  write_dgs(out, events, name);
  return kOk;
}

struct ReplayOptions {
  bool strict = false;
  bool stats = false;
};

/// Prints `nodes=N edges=M last_step=T events=E skipped=S`; with stats a
/// second line with component and degree figures.
inline int cmd_replay(std::istream& in, const ReplayOptions& opts, std::ostream& out, std::ostream& err) {
  DgsReader reader(in);
  GraphPolicy policy;
  policy.strict = opts.strict;
  DynamicGraph g(policy);
  std::size_t events = 0;
  const int rc = detail::guarded(err, &reader, [&] {
    while (auto e = reader.next()) {
      ++events;
      g.apply(*e);
    }
  });
  if (rc != kOk) return rc;
  out << "nodes=" << g.node_count() << " edges=" << g.edge_count() << " last_step=" << format_number(g.now())
      << " events=" << events << " skipped=" << g.skipped_count() << '\n';
  if (opts.stats) {
    ComponentTracker cc(g);
    std::size_t max_degree = 0, degree_sum = 0;
    for (const auto& id : g.node_ids()) {
      const std::size_t d = g.degree(id);
      max_degree = std::max(max_degree, d);
      degree_sum += d;
    }
    const double avg = g.node_count() == 0 ? 0.0
                                           : static_cast<double>(degree_sum) / static_cast<double>(g.node_count());
    out << "components=" << cc.count() << " max_degree=" << max_degree << " avg_degree=" << format_number(avg)
        << '\n';
  }
  return kOk;
}

/// Prints `step,count` rows: one per step group with `per_step`, otherwise
/// only the final state.
inline int cmd_components(std::istream& in, bool per_step, std::ostream& out, std::ostream& err) {
  DgsReader reader(in);
  DynamicGraph g;
  ComponentTracker cc(g);
  StepGroups groups([&](Timestamp t) {
    if (per_step) out << format_number(t) << ',' << cc.count() << '\n';
  });
  groups.set_downstream(&g);
  g.set_downstream(&cc);
  out << "step,count\n";
  const int rc = detail::guarded(err, &reader, [&] {
    reader.run(groups);
    groups.close();
  });
  if (rc != kOk) return rc;
  if (!per_step) out << format_number(g.now()) << ',' << cc.count() << '\n';
  return kOk;
}

struct ForestOptions {
  std::size_t steps_per_tick = 3;
  std::uint64_t seed = 0;
};

/// Replays `source`, running `steps_per_tick` forest rounds after each step
/// group. Metrics rows go to `csv` (if given); a summary goes to `out`.
inline int cmd_forest(Source& source, const ForestOptions& opts, std::ostream* csv, std::ostream& out,
                      std::ostream& err, const DgsReader* reader = nullptr) {
  DynamicGraph g;
  ComponentTracker cc(g);
  SpanningForest forest(g, opts.seed);
  detail::ForestDriver driver(g, cc, forest, opts.steps_per_tick, csv);
  StepGroups groups([&](Timestamp t) { driver.on_step_end(t); });
  groups.set_downstream(&g);
  g.set_downstream(&cc);
  cc.set_downstream(&forest);
  const int rc = detail::guarded(err, reader, [&] {
    source.run(groups);
    groups.close();
  });
  if (rc != kOk) return rc;
  out << "steps=" << driver.steps() << " nodes=" << g.node_count() << " edges=" << g.edge_count()
      << " trees=" << forest.trees().size() << " tokens=" << forest.token_count()
      << " tree_edges=" << forest.tree_edge_count() << '\n';
  return kOk;
}

struct RenderOptions {
  std::optional<Timestamp> at;
  RenderSpec spec;
  bool forest = false;
  ForestOptions forest_opts;
};

namespace detail {

struct StopReplay {};

}  // namespace detail

/// Replays up to the end of step `at` (or the whole stream) and writes an
/// SVG snapshot.
inline int cmd_render(std::istream& in, const RenderOptions& opts, std::ostream& svg, std::ostream& err) {
  try {
    validate(opts.spec);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  DgsReader reader(in);
  DynamicGraph g;
  ComponentTracker cc(g);
  SpanningForest forest(g, opts.forest_opts.seed);
  detail::ForestDriver driver(g, cc, forest, opts.forest ? opts.forest_opts.steps_per_tick : 0, nullptr);
  bool reached = false;
  StepGroups groups([&](Timestamp t) {
    driver.on_step_end(t);
    if (opts.at && t == *opts.at) {
      reached = true;
      throw detail::StopReplay{};
    }
  });
  groups.set_downstream(&g);
  g.set_downstream(&cc);
  cc.set_downstream(&forest);
  const int rc = detail::guarded(err, &reader, [&] {
    try {
      reader.run(groups);
      groups.close();
    } catch (const detail::StopReplay&) {
    }
  });
  if (rc != kOk) return rc;
  if (opts.at && !reached) {
    err << "error: unknown step " << format_number(*opts.at) << '\n';
    return kInput;
  }
  svg << render_svg(g, opts.spec, opts.forest ? &forest : nullptr);
  return kOk;
}

}  // namespace evgraph::cli
