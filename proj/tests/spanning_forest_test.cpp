#include <gtest/gtest.h>

#include "evgraph/components.hpp"
#include "evgraph/generators.hpp"
#include "evgraph/mobility.hpp"
#include "evgraph/spanning_forest.hpp"
#include "support/oracles.hpp"

using namespace evgraph;

namespace {

// Graph feeding a forest; events applied to `g` reach `f`.
struct Rig {
  DynamicGraph g;
  SpanningForest f;
  explicit Rig(std::uint64_t seed = 0) : f(g, seed) { g.set_downstream(&f); }

  void steps(std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) f.step();
  }
  void expect_ok() const {
    EXPECT_TRUE(check_forest(f, g).empty()) << check_forest(f, g).front();
    EXPECT_EQ(oracle::forest_violations(f, g.snapshot()), 0u);
  }
};

}  // namespace

TEST(SpanningForest, EmptyGraph) {
  Rig r;
  EXPECT_TRUE(r.f.nodes().empty());
  EXPECT_TRUE(r.f.trees().empty());
  r.f.step();
  r.expect_ok();
}

TEST(SpanningForest, InitialisationOnExistingGraph) {
  DynamicGraph g;
  g.add_edge("ab", "a", "b");
  g.add_node("c");
  SpanningForest f(g, 1);
  EXPECT_EQ(f.token_count(), 3u);
  EXPECT_EQ(f.tree_edge_count(), 0u);
  EXPECT_EQ(f.trees().size(), g.node_count());
  EXPECT_TRUE(check_forest(f, g).empty());
}

TEST(SpanningForest, SingleEdgeMergesOnStepWithTokenAtSmallerId) {
  Rig r;
  r.g.add_edge("AB", "A", "B");
  EXPECT_FALSE(r.f.in_tree("AB"));
  EXPECT_EQ(r.f.token_count(), 2u);
  r.f.step();
  EXPECT_TRUE(r.f.in_tree("AB"));
  EXPECT_EQ(r.f.token_count(), 1u);
  EXPECT_TRUE(r.f.has_token("A"));
  r.expect_ok();
}

TEST(SpanningForest, OneNodeStepIsNoop) {
  Rig r;
  r.g.add_node("solo");
  const SpanningForest before = r.f;
  r.f.step();
  EXPECT_EQ(r.f.nodes(), before.nodes());
  EXPECT_TRUE(r.f.has_token("solo"));
}

TEST(SpanningForest, RemovingTreeEdgeGivesTokenToRootlessHalf) {
  Rig r;
  r.g.add_edge("AB", "A", "B");
  r.f.merge_tokens();  // token at A
  ASSERT_TRUE(r.f.has_token("A"));
  r.g.remove_edge("AB");
  EXPECT_TRUE(r.f.has_token("A"));
  EXPECT_TRUE(r.f.has_token("B"));
  EXPECT_EQ(r.f.trees().size(), 2u);
  r.expect_ok();
}

TEST(SpanningForest, PathSplitCreatesTokenOnlyWhereMissing) {
  Rig r;
  r.g.add_edge("AB", "A", "B");
  r.g.add_edge("BC", "B", "C");
  // Edge scan order: AB merges (A keeps token), then BC is skipped because
  // B has none. A second merge pass has A and C as holders, still no edge.
  r.f.merge_tokens();
  ASSERT_TRUE(r.f.in_tree("AB"));
  ASSERT_FALSE(r.f.in_tree("BC"));
  // Move A's token to B by hand through a single-neighbour hop.
  r.f.move_tokens();  // A has one tree neighbour: the token goes to B
  ASSERT_TRUE(r.f.has_token("B"));
  r.f.merge_tokens();  // B and C hold tokens: BC joins, C loses its token
  ASSERT_TRUE(r.f.in_tree("BC"));
  ASSERT_EQ(r.f.token_count(), 1u);
  // Walk the token to C. B's tree neighbours are A and C; retry until it lands.
  for (int i = 0; i < 200 && !r.f.has_token("C"); ++i) r.f.move_tokens();
  ASSERT_TRUE(r.f.has_token("C"));

  r.g.remove_edge("AB");
  EXPECT_TRUE(r.f.has_token("A"));
  EXPECT_TRUE(r.f.has_token("C"));
  EXPECT_FALSE(r.f.has_token("B"));
  EXPECT_EQ(r.f.token_count(), 2u);
  EXPECT_EQ(r.f.trees(), (std::vector<std::vector<std::string>>{{"A"}, {"B", "C"}}));
  r.expect_ok();
}

TEST(SpanningForest, NonTreeEdgeRemovalOnlyDropsBookkeeping) {
  Rig r;
  r.g.add_edge("ab", "a", "b");
  r.g.add_edge("bc", "b", "c");
  r.g.add_edge("ca", "c", "a");
  r.steps(50);
  std::string spare;
  for (const auto& [eid, es] : r.f.edges())
    if (!es.in_tree) spare = eid;
  ASSERT_FALSE(spare.empty());
  auto nodes_before = r.f.nodes();
  r.g.remove_edge(spare);
  EXPECT_EQ(r.f.nodes(), nodes_before);
  EXPECT_EQ(r.f.edges().count(spare), 0u);
  r.expect_ok();
}

TEST(SpanningForest, EdgeAddedThenRemovedBeforeStep) {
  Rig r;
  r.g.add_node("a");
  r.g.add_node("b");
  const SpanningForest before = r.f;
  r.g.add_edge("ab", "a", "b");
  EXPECT_EQ(r.f.tree_edge_count(), 0u);  // not merged until a step
  r.g.remove_edge("ab");
  EXPECT_EQ(r.f, before);
}

TEST(SpanningForest, EdgeInsideTreeStaysNonTree) {
  Rig r;
  r.g.add_edge("ab", "a", "b");
  r.g.add_edge("bc", "b", "c");
  r.steps(200);
  ASSERT_EQ(r.f.trees().size(), 1u);
  r.g.add_edge("ca", "c", "a");
  r.steps(200);
  EXPECT_FALSE(r.f.in_tree("ca"));
  r.expect_ok();
}

TEST(SpanningForest, NodeRemovalCascadeKeepsInvariants) {
  Rig r;
  for (const auto& e : generate(GeneratorSpec::grid(3, 3))) r.g.apply(e);
  r.steps(300);
  r.g.remove_node("n4");  // centre of the grid
  r.expect_ok();
  r.steps(300);
  r.expect_ok();
}

TEST(SpanningForest, StaticConnectedGraphConvergesToOneTree) {
  Rig r(7);
  for (const auto& e : generate(GeneratorSpec::random(10, 0.5, 3))) r.g.apply(e);
  ASSERT_EQ(oracle::count_components(r.g.snapshot()), 1u);
  std::size_t steps = 0;
  while (r.f.trees().size() > 1 && steps < 10000) {
    r.f.step();
    ++steps;
  }
  EXPECT_EQ(r.f.trees().size(), 1u);
  EXPECT_EQ(r.f.token_count(), 1u);
  EXPECT_EQ(r.f.tree_edge_count(), 9u);
  r.expect_ok();
}

TEST(SpanningForest, UnknownIdsAreOutOfSync) {
  DynamicGraph g;
  SpanningForest f(g, 0);
  EXPECT_THROW(f.consume(EdgeAdded{"e", "x", "y", false, {}}), std::logic_error);
  EXPECT_THROW(f.consume(NodeRemoved{"x"}), std::logic_error);
  EXPECT_THROW(f.consume(EdgeRemoved{"e"}), std::logic_error);
}

// Metrics -------------------------------------------------------------------

TEST(TreeMetrics, SingleNode) {
  Rig r;
  r.g.add_node("a");
  const auto tm = r.f.metrics();
  EXPECT_EQ(tm.size_histogram, (std::map<std::size_t, std::size_t>{{1, 1}}));
  EXPECT_EQ(tm.avg_diameter_by_size.at(1), 0.0);
  EXPECT_EQ(tm.avg_inner_degree_by_size.at(1), 0.0);
}

TEST(TreeMetrics, PathOfFour) {
  Rig r;
  // Scanned in id order: b-c then a-b merge in the first round, leaving
  // {a,b,c} and {d}. The lone token at d waits for the walker to reach c.
  r.g.add_edge("e1", "b", "c");
  r.g.add_edge("e2", "a", "b");
  r.g.add_edge("e3", "c", "d");
  r.steps(500);
  ASSERT_EQ(r.f.tree_edge_count(), 3u);
  const auto tm = r.f.metrics();
  EXPECT_EQ(tm.size_histogram, (std::map<std::size_t, std::size_t>{{4, 1}}));
  EXPECT_EQ(tm.avg_diameter_by_size.at(4), 3.0);
  EXPECT_EQ(tm.avg_inner_degree_by_size.at(4), 2.0);
}

TEST(TreeMetrics, StarOfFive) {
  Rig r;
  for (const char* leaf : {"l1", "l2", "l3", "l4"}) r.g.add_edge(std::string("h") + leaf, "hub", leaf);
  r.steps(500);
  ASSERT_EQ(r.f.tree_edge_count(), 4u);
  const auto tm = r.f.metrics();
  EXPECT_EQ(tm.avg_diameter_by_size.at(5), 2.0);
  EXPECT_EQ(tm.avg_inner_degree_by_size.at(5), 4.0);
}

TEST(TreeMetrics, HistogramSumsToTreeCount) {
  Rig r(3);
  for (const auto& e : generate(GeneratorSpec::random(40, 0.04, 8))) r.g.apply(e);
  r.steps(20);
  std::size_t total = 0;
  for (const auto& [size, count] : r.f.metrics().size_histogram) total += count;
  EXPECT_EQ(total, r.f.trees().size());
}

TEST(TreeDiameter, DoubleSweepMatchesBruteForce) {
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(50);
    std::vector<std::vector<std::size_t>> adj(n);
    for (auto [a, b] : oracle::random_tree(n, rng)) {
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
    const std::size_t start = rng.below(n);
    const auto sweep = tree_diameter(start, [&](std::size_t u, auto&& fn) {
      for (auto v : adj[u]) fn(v);
    });
    ASSERT_EQ(sweep, oracle::brute_force_diameter(adj)) << "trial " << trial;
  }
}

// Properties ----------------------------------------------------------------

TEST(SpanningForestProperty, MoveTokensConservesTokensAndTrees) {
  Rig r(11);
  for (const auto& e : generate(GeneratorSpec::random(30, 0.15, 4))) r.g.apply(e);
  r.steps(5);
  for (int i = 0; i < 100; ++i) {
    const auto tokens = r.f.token_count();
    const auto trees = r.f.trees();
    r.f.move_tokens();
    ASSERT_EQ(r.f.token_count(), tokens);
    ASSERT_EQ(r.f.trees(), trees);
    r.expect_ok();
  }
}

TEST(SpanningForestProperty, MergeNeverIncreasesTreeCount) {
  Rig r(12);
  for (const auto& e : generate(GeneratorSpec::random(30, 0.15, 5))) r.g.apply(e);
  for (int i = 0; i < 200; ++i) {
    const auto before = r.f.trees().size();
    const auto tree_edges = r.f.tree_edge_count();
    r.f.step();
    const auto after = r.f.trees().size();
    ASSERT_LE(after, before);
    ASSERT_EQ(before - after, r.f.tree_edge_count() - tree_edges);
  }
  r.expect_ok();
}

TEST(SpanningForestProperty, InvariantsUnderRandomStreams) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    oracle::StreamOptions opts;
    opts.attributes = false;
    opts.node_pool = 10;
    Rig r(seed);
    for (const auto& e : oracle::RandomStream(seed, opts).generate(400)) {
      r.g.apply(e);
      if (std::holds_alternative<StepBegins>(e)) r.steps(3);
      ASSERT_TRUE(check_forest(r.f, r.g).empty()) << "seed " << seed << ": " << check_forest(r.f, r.g).front();
      ASSERT_EQ(oracle::forest_violations(r.f, r.g.snapshot()), 0u) << "seed " << seed;
    }
  }
}

TEST(SpanningForestProperty, DeterministicForSeed) {
  MobilityConfig cfg;
  cfg.stations = 15;
  cfg.width = cfg.height = 300;
  cfg.ticks = 40;
  cfg.seed = 5;
  const auto events = mob_run(cfg);
  auto run = [&](std::uint64_t seed) {
    Rig r(seed);
    for (const auto& e : events) {
      r.g.apply(e);
      if (std::holds_alternative<StepBegins>(e)) r.steps(3);
    }
    return r.f;
  };
  EXPECT_EQ(run(9), run(9));
}

TEST(SpanningForest, SynchronousWalksCanStayOutOfPhase) {
  // Two 2-node trees joined by b-c: tokens alternate a,b and c,d in lockstep
  // (tree walks flip parity every round), so b and c never hold tokens
  // together and the trees never merge.
  Rig r;
  r.g.add_edge("ab", "a", "b");
  r.g.add_edge("bc", "b", "c");
  r.g.add_edge("cd", "c", "d");
  r.steps(1000);
  EXPECT_EQ(r.f.trees(), (std::vector<std::vector<std::string>>{{"a", "b"}, {"c", "d"}}));
  r.expect_ok();
}

TEST(CheckForest, DetectsCorruption) {
  // A forest built for one graph, checked against a different graph.
  DynamicGraph g1, g2;
  g1.add_edge("ab", "a", "b");
  g2.add_node("a");
  SpanningForest f(g1, 0);
  f.step();
  EXPECT_FALSE(check_forest(f, g2).empty());
  EXPECT_GT(oracle::forest_violations(f, g2.snapshot()), 0u);
}
