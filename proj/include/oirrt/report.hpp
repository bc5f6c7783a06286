#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "oirrt/bench.hpp"
#include "oirrt/scenario.hpp"
#include "oirrt/tree.hpp"

namespace oirrt {

namespace detail {

inline std::string fixed6(double v) {
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

} // namespace detail

/// `run_id,t,cost` rows ordered by (run_id, t); costs with six decimals and
/// `inf` before the first solution.
inline std::string writeCsv(const ConvergenceTable &table,
                            const std::vector<double> &grid) {
  std::string out = "run_id,t,cost\n";
  for (std::size_t r = 0; r < table.runs.size(); ++r)
    for (double t : grid) {
      out += std::to_string(r);
      out += ',';
      out += detail::fixed6(t);
      out += ',';
      out += detail::fixed6(costAt(table.runs[r], t));
      out += '\n';
    }
  return out;
}

inline std::string writeCsv(const ConvergenceTable &table) {
  return writeCsv(table, table.sampleTimes);
}

/// One row per grid time: t, success rate, min, each percentile, max.
inline std::string writePercentileCsv(const PercentileCurves &curves) {
  std::string out = "t,success,min";
  for (double p : curves.percentiles)
    out += ",p" + detail::fixed6(p).substr(0, detail::fixed6(p).find('.'));
  out += ",max\n";
  for (std::size_t g = 0; g < curves.grid.size(); ++g) {
    out += detail::fixed6(curves.grid[g]) + ',' +
           detail::fixed6(curves.successRate[g]) + ',' +
           detail::fixed6(curves.min[g]);
    for (const auto &row : curves.values)
      out += ',' + detail::fixed6(row[g]);
    out += ',' + detail::fixed6(curves.max[g]) + '\n';
  }
  return out;
}

/// SVG drawing of the world, an optional tree and an optional path, with
/// the world's y axis pointing up.
inline std::string renderSvg(const Scenario &scenario, const Tree *tree,
                             const Path *path) {
  const Box &b = scenario.world.bounds();
  const double w = b.width();
  const double h = b.height();
  const double stroke = std::max(w, h) / 500.0;
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return std::string(buf);
  };
  // Flip y so the drawing matches configuration-space coordinates.
  auto X = [&](double x) { return num(x - b.min.x); };
  auto Y = [&](double y) { return num(b.max.y - y); };

  std::string svg = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " + num(w) +
         " " + num(h) + "\" width=\"800\" height=\"" +
         num(800.0 * h / w) + "\">\n";
  svg += "<rect class=\"bounds\" x=\"0\" y=\"0\" width=\"" + num(w) +
         "\" height=\"" + num(h) + "\" fill=\"white\" stroke=\"black\" "
         "stroke-width=\"" + num(stroke) + "\"/>\n";

  svg += "<g class=\"obstacles\" fill=\"#555555\">\n";
  for (const Obstacle &o : scenario.world.obstacles()) {
    if (const Circle *c = o.asCircle()) {
      svg += "<circle cx=\"" + X(c->center.x) + "\" cy=\"" + Y(c->center.y) +
             "\" r=\"" + num(c->radius) + "\"/>\n";
    } else {
      svg += "<polygon points=\"";
      for (Config v : o.asPolygon()->vertices)
        svg += X(v.x) + "," + Y(v.y) + " ";
      svg += "\"/>\n";
    }
  }
  svg += "</g>\n";

  if (tree) {
    svg += "<g class=\"tree\" stroke=\"#4a7bd0\" stroke-width=\"" +
           num(stroke) + "\">\n";
    for (const auto &node : tree->nodes()) {
      if (node.parent == kNoNode)
        continue;
      const Config p = tree->config(node.parent);
      svg += "<line x1=\"" + X(p.x) + "\" y1=\"" + Y(p.y) + "\" x2=\"" +
             X(node.config.x) + "\" y2=\"" + Y(node.config.y) + "\"/>\n";
    }
    svg += "</g>\n";
  }

  if (path && !path->nodes.empty()) {
    svg += "<polyline class=\"path\" fill=\"none\" stroke=\"#d03030\" "
           "stroke-width=\"" + num(4.0 * stroke) + "\" points=\"";
    for (Config q : path->nodes)
      svg += X(q.x) + "," + Y(q.y) + " ";
    svg += "\"/>\n";
  }

  const double marker = std::max(scenario.goalRadius, 3.0 * stroke);
  svg += "<circle class=\"start\" cx=\"" + X(scenario.start.x) + "\" cy=\"" +
         Y(scenario.start.y) + "\" r=\"" + num(marker) +
         "\" fill=\"#20a020\"/>\n";
  svg += "<circle class=\"goal\" cx=\"" + X(scenario.goal.x) + "\" cy=\"" +
         Y(scenario.goal.y) + "\" r=\"" + num(marker) +
         "\" fill=\"#e0a000\"/>\n";
  svg += "</svg>\n";
  return svg;
}

inline void renderSvg(const Scenario &scenario, const Tree *tree,
                      const Path *path, const std::string &outFile) {
  writeFile(outFile, renderSvg(scenario, tree, path));
}

} // namespace oirrt
