#pragma once

// Random-waypoint mobile stations with unit-disk connectivity, as an event
// source. Stations are nodes `s<i>` carrying x/y attributes; a link `l<i>_<j>`
// exists while two stations are within communication range.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "evgraph/event.hpp"
#include "evgraph/rng.hpp"

namespace evgraph {

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

struct Station {
  std::string id;
  Point pos;
  Point waypoint;
  double speed = 0.0;  // meters per tick
};

struct MobilityConfig {
  std::size_t stations = 1;
  double width = 1000.0;
  double height = 1000.0;
  double radius = 100.0;
  double v_min = 0.0;
  double v_max = 10.0;
  std::size_t ticks = 0;  // total ticks, tick 0 included
  std::uint64_t seed = 0;
};

inline void validate(const MobilityConfig& c) {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (c.stations < 1) throw std::invalid_argument("mobility needs at least one station");
  if (!positive(c.width) || !positive(c.height))
    throw std::invalid_argument("arena width and height must be > 0");
  if (!positive(c.radius)) throw std::invalid_argument("radius must be > 0");
  if (!(std::isfinite(c.v_min) && std::isfinite(c.v_max) && c.v_min >= 0.0 && c.v_min <= c.v_max))
    throw std::invalid_argument("speeds must satisfy 0 <= v_min <= v_max");
}

inline std::string station_id(std::size_t i) { return "s" + std::to_string(i); }

inline std::string link_id(std::size_t i, std::size_t j) {
  if (i > j) std::swap(i, j);
  return "l" + std::to_string(i) + "_" + std::to_string(j);
}

inline bool in_range(const Point& a, const Point& b, double radius) {
  return std::hypot(a.x - b.x, a.y - b.y) <= radius;
}

/// Index pairs (i < j) of points within `radius` of each other, ties
/// included, in lexicographic order.
inline std::vector<std::pair<std::size_t, std::size_t>> proximity_pairs(std::span<const Point> points,
                                                                        double radius) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      if (in_range(points[i], points[j], radius)) out.emplace_back(i, j);
  return out;
}

inline std::vector<std::pair<std::size_t, std::size_t>> proximity_pairs(std::span<const Station> stations,
                                                                        double radius) {
  std::vector<Point> pts;
  pts.reserve(stations.size());
  for (const auto& s : stations) pts.push_back(s.pos);
  return proximity_pairs(pts, radius);
}

class MobilitySource : public Source {
 public:
  explicit MobilitySource(MobilityConfig cfg) : cfg_(cfg) { validate(cfg_); }

  void run(Sink& out) override {
    if (cfg_.ticks == 0) return;
    SplitMix64 rng(cfg_.seed);
    std::vector<Station> stations(cfg_.stations);
    for (std::size_t i = 0; i < stations.size(); ++i) {
      Station& s = stations[i];
      s.id = station_id(i);
      s.pos = random_point(rng);
      s.waypoint = random_point(rng);
      s.speed = rng.uniform(cfg_.v_min, cfg_.v_max);
    }

    out.consume(StepBegins{0.0});
    for (const auto& s : stations)
      out.consume(NodeAdded{s.id, {{"x", AttrValue(s.pos.x)}, {"y", AttrValue(s.pos.y)}}});
    auto linked = proximity_pairs(stations, cfg_.radius);
    for (const auto& [i, j] : linked) out.consume(link_added(i, j));

    for (std::size_t t = 1; t < cfg_.ticks; ++t) {
      out.consume(StepBegins{static_cast<double>(t)});
      for (auto& s : stations) {
        if (advance(s, rng)) {
          out.consume(NodeAttrChanged{s.id, "x", AttrValue(s.pos.x)});
          out.consume(NodeAttrChanged{s.id, "y", AttrValue(s.pos.y)});
        }
      }
      auto now = proximity_pairs(stations, cfg_.radius);
      std::vector<std::pair<std::size_t, std::size_t>> gone, fresh;
      std::set_difference(linked.begin(), linked.end(), now.begin(), now.end(), std::back_inserter(gone));
      std::set_difference(now.begin(), now.end(), linked.begin(), linked.end(), std::back_inserter(fresh));
      for (const auto& [i, j] : gone) out.consume(EdgeRemoved{link_id(i, j)});
      for (const auto& [i, j] : fresh) out.consume(link_added(i, j));
      linked = std::move(now);
    }
  }

 private:
  Point random_point(SplitMix64& rng) const {
    return {rng.uniform(0.0, cfg_.width), rng.uniform(0.0, cfg_.height)};
  }

  static EdgeAdded link_added(std::size_t i, std::size_t j) {
    return EdgeAdded{link_id(i, j), station_id(i), station_id(j), false, {}};
  }

  // Moves `speed` meters toward the waypoint; on arrival picks a new
  // waypoint and speed. Returns whether the position changed.
  bool advance(Station& s, SplitMix64& rng) const {
    const Point before = s.pos;
    const double dx = s.waypoint.x - s.pos.x;
    const double dy = s.waypoint.y - s.pos.y;
    const double dist = std::hypot(dx, dy);
    if (dist <= s.speed) {
      s.pos = s.waypoint;
      s.waypoint = random_point(rng);
      s.speed = rng.uniform(cfg_.v_min, cfg_.v_max);
    } else {
      const double f = s.speed / dist;
      s.pos.x = std::clamp(s.pos.x + dx * f, 0.0, cfg_.width);
      s.pos.y = std::clamp(s.pos.y + dy * f, 0.0, cfg_.height);
    }
    return !(s.pos == before);
  }

  MobilityConfig cfg_;
};

/// Whole mobility stream for `cfg`; deterministic per seed.
inline EventList mob_run(const MobilityConfig& cfg) {
  MobilitySource src(cfg);
  Collector c;
  src.run(c);
  return std::move(c.events);
}

}  // namespace evgraph
