// Three edges between never-declared nodes: endpoints are created on the fly.
// Writes the triangle as SVG to stdout.

#include <iostream>

#include "evgraph/graph.hpp"
#include "evgraph/render.hpp"

int main() {
  evgraph::DynamicGraph graph;
  graph.add_edge("AB", "A", "B");
  graph.add_edge("BC", "B", "C");
  graph.add_edge("CA", "C", "A");

  std::cerr << graph.node_count() << " nodes, " << graph.edge_count() << " edges\n";
  std::cout << evgraph::render_svg(graph, evgraph::RenderSpec{});
}
