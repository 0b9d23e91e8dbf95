#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "evgraph/event.hpp"
#include "evgraph/rng.hpp"

namespace evgraph {

enum class GeneratorFamily { grid, torus, random, preferential };

struct GeneratorSpec {
  GeneratorFamily family = GeneratorFamily::grid;
  std::size_t rows = 1;       // grid, torus
  std::size_t cols = 1;       // grid, torus
  std::size_t nodes = 0;      // random, preferential
  double probability = 0.0;   // random
  std::size_t per_node = 1;   // preferential: edges attached by each new node
  std::uint64_t seed = 0;

  static GeneratorSpec grid(std::size_t rows, std::size_t cols) {
    return {GeneratorFamily::grid, rows, cols};
  }
  static GeneratorSpec torus(std::size_t rows, std::size_t cols) {
    return {GeneratorFamily::torus, rows, cols};
  }
  static GeneratorSpec random(std::size_t n, double p, std::uint64_t seed = 0) {
    GeneratorSpec s{GeneratorFamily::random};
    s.nodes = n;
    s.probability = p;
    s.seed = seed;
    return s;
  }
  static GeneratorSpec preferential(std::size_t n, std::size_t k, std::uint64_t seed = 0) {
    GeneratorSpec s{GeneratorFamily::preferential};
    s.nodes = n;
    s.per_node = k;
    s.seed = seed;
    return s;
  }
};

inline std::string generator_node_id(std::size_t i) { return "n" + std::to_string(i); }

inline std::string generator_edge_id(std::size_t a, std::size_t b) {
  return "e" + std::to_string(a) + "_" + std::to_string(b);
}

namespace detail {

// Collects construction events. Edges are normalized so the smaller index
// comes first; duplicates and self-loops are dropped.
class GraphBuilder {
 public:
  explicit GraphBuilder(std::size_t n) {
    events_.emplace_back(StepBegins{0.0});
    for (std::size_t i = 0; i < n; ++i) events_.emplace_back(NodeAdded{generator_node_id(i), {}});
  }

  void edge(std::size_t a, std::size_t b) {
    if (a == b) return;
    if (a > b) std::swap(a, b);
    if (!seen_.insert({a, b}).second) return;
    events_.emplace_back(
        EdgeAdded{generator_edge_id(a, b), generator_node_id(a), generator_node_id(b), false, {}});
  }

  EventList take() { return std::move(events_); }

 private:
  EventList events_;
  std::set<std::pair<std::size_t, std::size_t>> seen_;
};

inline EventList lattice(std::size_t rows, std::size_t cols, bool wrap) {
  GraphBuilder b(rows * cols);
  auto at = [cols](std::size_t r, std::size_t c) { return r * cols + c; };
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (c + 1 < cols) b.edge(at(r, c), at(r, c + 1));
      if (r + 1 < rows) b.edge(at(r, c), at(r + 1, c));
    }
  }
  if (wrap) {
    for (std::size_t r = 0; r < rows; ++r) b.edge(at(r, cols - 1), at(r, 0));
    for (std::size_t c = 0; c < cols; ++c) b.edge(at(rows - 1, c), at(0, c));
  }
  return b.take();
}

inline EventList erdos_renyi(std::size_t n, double p, std::uint64_t seed) {
  GraphBuilder b(n);
  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (rng.uniform() < p) b.edge(i, j);
  return b.take();
}

// k-clique seed, then each new node picks k distinct existing targets with
// probability proportional to their degree before the node arrived.
inline EventList preferential_attachment(std::size_t n, std::size_t k, std::uint64_t seed) {
  GraphBuilder b(n);
  SplitMix64 rng(seed);
  std::vector<std::uint64_t> degree(n, 0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      b.edge(i, j);
      ++degree[i];
      ++degree[j];
    }
  }
  std::vector<bool> taken(n, false);
  std::vector<std::size_t> targets;
  for (std::size_t v = k; v < n; ++v) {
    targets.clear();
    for (std::size_t pick = 0; pick < k; ++pick) {
      std::uint64_t total = 0;
      std::size_t free_count = 0;
      for (std::size_t u = 0; u < v; ++u) {
        if (taken[u]) continue;
        total += degree[u];
        ++free_count;
      }
      std::size_t chosen = v;
      if (total == 0) {
        std::uint64_t r = rng.below(free_count);
        for (std::size_t u = 0; u < v; ++u) {
          if (taken[u]) continue;
          if (r-- == 0) {
            chosen = u;
            break;
          }
        }
      } else {
        std::uint64_t r = rng.below(total);
        for (std::size_t u = 0; u < v; ++u) {
          if (taken[u]) continue;
          if (r < degree[u]) {
            chosen = u;
            break;
          }
          r -= degree[u];
        }
      }
      taken[chosen] = true;
      targets.push_back(chosen);
    }
    std::sort(targets.begin(), targets.end());
    for (std::size_t u : targets) {
      b.edge(u, v);
      taken[u] = false;
    }
    for (std::size_t u : targets) ++degree[u];
    degree[v] += k;
  }
  return b.take();
}

}  // namespace detail

inline void validate(const GeneratorSpec& spec) {
  switch (spec.family) {
    case GeneratorFamily::grid:
    case GeneratorFamily::torus:
      if (spec.rows < 1 || spec.cols < 1)
        throw std::invalid_argument("grid/torus need rows >= 1 and cols >= 1");
      break;
    case GeneratorFamily::random:
      if (!(spec.probability >= 0.0 && spec.probability <= 1.0))
        throw std::invalid_argument("random needs 0 <= p <= 1");
      break;
    case GeneratorFamily::preferential:
      if (spec.nodes < 1 || spec.per_node < 1)
        throw std::invalid_argument("preferential needs n >= 1 and k >= 1");
      if (spec.nodes < spec.per_node)
        throw std::invalid_argument("preferential needs n >= k");
      break;
  }
}

/// Construction stream for a classic graph family: StepBegins{0}, every
/// NodeAdded (`n<i>`), then every EdgeAdded (`e<i>_<j>`, i < j).
/// Deterministic for a given spec.
inline EventList generate(const GeneratorSpec& spec) {
  validate(spec);
  switch (spec.family) {
    case GeneratorFamily::grid:
      return detail::lattice(spec.rows, spec.cols, false);
    case GeneratorFamily::torus:
      return detail::lattice(spec.rows, spec.cols, true);
    case GeneratorFamily::random:
      return detail::erdos_renyi(spec.nodes, spec.probability, spec.seed);
    case GeneratorFamily::preferential:
      return detail::preferential_attachment(spec.nodes, spec.per_node, spec.seed);
  }
  return {};
}

class GeneratorSource : public Source {
 public:
  explicit GeneratorSource(GeneratorSpec spec) : spec_(spec) {}
  void run(Sink& out) override {
    for (const auto& e : generate(spec_)) out.consume(e);
  }

 private:
  GeneratorSpec spec_;
};

}  // namespace evgraph
