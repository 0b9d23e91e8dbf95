#pragma once

// The five dated event sets of the reference dynamic graph example, encoded
// as an atomic event stream.

#include "evgraph/event.hpp"

namespace fixtures {

inline evgraph::EventList fig2_events() {
  using namespace evgraph;
  return {
      StepBegins{0},        NodeAdded{"v1", {}},  NodeAdded{"v2", {}},
      EdgeAdded{"e12", "v1", "v2", false, {}},
      StepBegins{1},        NodeAdded{"v3", {}},  NodeAdded{"v4", {}},
      EdgeAdded{"e13", "v1", "v3", false, {}},
      StepBegins{2},        NodeRemoved{"v2"},    EdgeAdded{"e34", "v3", "v4", false, {}},
      StepBegins{4},        NodeAdded{"v2", {}},  NodeAdded{"v5", {}},
      StepBegins{5},        NodeAdded{"v6", {}},  EdgeAdded{"e56", "v5", "v6", false, {}},
      EdgeAdded{"e46", "v4", "v6", false, {}},    EdgeAdded{"e24", "v2", "v4", false, {}},
      EdgeRemoved{"e13"},
  };
}

}  // namespace fixtures
