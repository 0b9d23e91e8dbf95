// Random waypoint stations feeding a graph, a component tracker and the
// token spanning forest; prints per-tick tree statistics.

#include <cstdlib>
#include <iostream>

#include "evgraph/commands.hpp"

int main(int argc, char** argv) {
  using namespace evgraph;

  MobilityConfig cfg;
  cfg.stations = 40;
  cfg.width = 1000;
  cfg.height = 1000;
  cfg.radius = 180;
  cfg.v_min = 1;
  cfg.v_max = 15;
  cfg.ticks = 100;
  cfg.seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1;

  DynamicGraph graph;
  ComponentTracker components(graph);
  SpanningForest forest(graph, cfg.seed);
  cli::StepGroups ticks([&](Timestamp t) {
    for (int i = 0; i < 3; ++i) forest.step();
    std::cout << "tick " << t << ": components=" << components.count()
              << " trees=" << forest.trees().size() << " tree_edges=" << forest.tree_edge_count()
              << '\n';
  });
  ticks.set_downstream(&graph);
  graph.set_downstream(&components);
  components.set_downstream(&forest);

  MobilitySource stations(cfg);
  stations.run(ticks);
  ticks.close();
}
