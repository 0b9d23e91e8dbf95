#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "evgraph/graph.hpp"
#include "evgraph/mobility.hpp"
#include "evgraph/rng.hpp"
#include "evgraph/spanning_forest.hpp"

namespace evgraph {

struct RenderSpec {
  double width = 800.0;
  double height = 600.0;
  int iterations = 300;
  double node_radius = 5.0;
  std::uint64_t seed = 0;

  // Canvas border kept free so enlarged token nodes stay inside.
  double margin() const { return 3.0 * node_radius; }
};

inline void validate(const RenderSpec& s) {
  if (!(s.width > 0 && s.height > 0)) throw std::invalid_argument("canvas dimensions must be > 0");
  if (s.iterations < 1) throw std::invalid_argument("layout iterations must be >= 1");
  if (!(s.node_radius > 0)) throw std::invalid_argument("node radius must be > 0");
  if (2 * s.margin() >= std::min(s.width, s.height))
    throw std::invalid_argument("node radius too large for the canvas");
}

using Layout = std::map<std::string, Point>;

/// Node positions taken from numeric `x`/`y` attributes, if every node has
/// both.
inline std::optional<Layout> positions_from_attrs(const DynamicGraph& g) {
  Layout out;
  for (const auto& id : g.node_ids()) {
    const Attrs& a = g.node_attrs(id);
    auto x = a.find("x");
    auto y = a.find("y");
    if (x == a.end() || y == a.end() || !x->second.is_number() || !y->second.is_number())
      return std::nullopt;
    out[id] = {x->second.as_number(), y->second.as_number()};
  }
  return out;
}

/// Spring embedder: pairwise repulsion k^2/d, attraction d^2/k along edges,
/// displacement capped by a temperature that cools linearly to zero.
/// Initial placement is uniform over the canvas from `spec.seed`.
inline Layout force_directed_layout(const DynamicGraph& g, const RenderSpec& spec) {
  const auto ids = g.node_ids();
  const std::size_t n = ids.size();
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index[ids[i]] = i;

  SplitMix64 rng(spec.seed);
  std::vector<Point> pos(n);
  for (auto& p : pos) p = {rng.uniform(0.0, spec.width), rng.uniform(0.0, spec.height)};

  std::vector<std::pair<std::size_t, std::size_t>> springs;
  for (const auto& [eid, ed] : g.edges())
    if (ed.src != ed.dst) springs.emplace_back(index[ed.src], index[ed.dst]);

  if (n > 1) {
    const double k = std::sqrt(spec.width * spec.height / static_cast<double>(n));
    const double t0 = spec.width / 10.0;
    std::vector<Point> disp(n);
    for (int it = 0; it < spec.iterations; ++it) {
      const double temp = t0 * (1.0 - static_cast<double>(it) / spec.iterations);
      std::fill(disp.begin(), disp.end(), Point{});
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          const double dx = pos[i].x - pos[j].x;
          const double dy = pos[i].y - pos[j].y;
          const double d = std::max(std::hypot(dx, dy), 0.01);
          const double f = k * k / d;
          disp[i].x += dx / d * f;
          disp[i].y += dy / d * f;
          disp[j].x -= dx / d * f;
          disp[j].y -= dy / d * f;
        }
      }
      for (const auto& [a, b] : springs) {
        const double dx = pos[a].x - pos[b].x;
        const double dy = pos[a].y - pos[b].y;
        const double d = std::max(std::hypot(dx, dy), 0.01);
        const double f = d * d / k;
        disp[a].x -= dx / d * f;
        disp[a].y -= dy / d * f;
        disp[b].x += dx / d * f;
        disp[b].y += dy / d * f;
      }
      for (std::size_t i = 0; i < n; ++i) {
        const double len = std::hypot(disp[i].x, disp[i].y);
        if (len <= 0) continue;
        const double step = std::min(len, temp);
        pos[i].x += disp[i].x / len * step;
        pos[i].y += disp[i].y / len * step;
      }
    }
  }

  Layout out;
  for (std::size_t i = 0; i < n; ++i) out[ids[i]] = pos[i];
  return out;
}

/// Uniformly scales and translates `layout` so its bounding box fills the
/// canvas inside the margin, preserving aspect ratio. A degenerate box is
/// centered.
inline Layout fit_to_canvas(const Layout& layout, const RenderSpec& spec) {
  if (layout.empty()) return {};
  double min_x = INFINITY, min_y = INFINITY, max_x = -INFINITY, max_y = -INFINITY;
  for (const auto& [id, p] : layout) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const double m = spec.margin();
  const double avail_w = spec.width - 2 * m;
  const double avail_h = spec.height - 2 * m;
  const double span_x = max_x - min_x;
  const double span_y = max_y - min_y;
  double scale = 0.0;
  if (span_x > 0) scale = avail_w / span_x;
  if (span_y > 0) scale = scale > 0 ? std::min(scale, avail_h / span_y) : avail_h / span_y;
  // Center the scaled box.
  const double off_x = m + (avail_w - span_x * scale) / 2.0;
  const double off_y = m + (avail_h - span_y * scale) / 2.0;
  Layout out;
  for (const auto& [id, p] : layout) out[id] = {off_x + (p.x - min_x) * scale, off_y + (p.y - min_y) * scale};
  return out;
}

namespace detail {

inline std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

/// SVG 1.1 drawing of `g` at canvas positions `layout`. With a forest, tree
/// edges are drawn thick and black and token holders at twice the radius.
inline std::string render_svg(const DynamicGraph& g, const Layout& layout, const RenderSpec& spec,
                              const SpanningForest* forest = nullptr) {
  using detail::svg_num;
  using detail::xml_escape;
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << svg_num(spec.width)
      << "\" height=\"" << svg_num(spec.height) << "\" viewBox=\"0 0 " << svg_num(spec.width) << ' '
      << svg_num(spec.height) << "\">\n"
      << "  <rect x=\"0\" y=\"0\" width=\"" << svg_num(spec.width) << "\" height=\""
      << svg_num(spec.height) << "\" fill=\"white\"/>\n";

  out << "  <g class=\"edges\">\n";
  for (const auto& [eid, ed] : g.edges()) {
    const Point& a = layout.at(ed.src);
    const Point& b = layout.at(ed.dst);
    const bool tree = forest != nullptr && forest->in_tree(eid);
    out << "    <line class=\"" << (tree ? "tree-edge" : "edge") << "\" data-id=\"" << xml_escape(eid)
        << "\" x1=\"" << svg_num(a.x) << "\" y1=\"" << svg_num(a.y) << "\" x2=\"" << svg_num(b.x)
        << "\" y2=\"" << svg_num(b.y) << "\" stroke=\"" << (tree ? "#000000" : "#a0a0a0")
        << "\" stroke-width=\"" << (tree ? "3" : "1") << "\"/>\n";
  }
  out << "  </g>\n";

  out << "  <g class=\"nodes\">\n";
  for (const auto& [id, p] : layout) {
    const bool token = forest != nullptr && forest->has_token(id);
    out << "    <circle class=\"" << (token ? "token" : "node") << "\" data-id=\"" << xml_escape(id)
        << "\" cx=\"" << svg_num(p.x) << "\" cy=\"" << svg_num(p.y) << "\" r=\""
        << svg_num(token ? 2 * spec.node_radius : spec.node_radius) << "\" fill=\""
        << (token ? "#d03030" : "#3060c0") << "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
  }
  out << "  </g>\n";

  out << "  <g class=\"labels\" font-family=\"sans-serif\" font-size=\"10\">\n";
  for (const auto& [id, p] : layout) {
    out << "    <text x=\"" << svg_num(p.x + 1.5 * spec.node_radius) << "\" y=\""
        << svg_num(p.y - 1.5 * spec.node_radius) << "\">" << xml_escape(id) << "</text>\n";
  }
  out << "  </g>\n</svg>\n";
  return out.str();
}

/// Attribute positions when every node has them, else a force-directed
/// layout; either way fitted to the canvas.
inline std::string render_svg(const DynamicGraph& g, const RenderSpec& spec,
                              const SpanningForest* forest = nullptr) {
  validate(spec);
  auto layout = positions_from_attrs(g);
  if (!layout) layout = force_directed_layout(g, spec);
  return render_svg(g, fit_to_canvas(*layout, spec), spec, forest);
}

}  // namespace evgraph
