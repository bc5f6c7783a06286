#pragma once

#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "oirrt/error.hpp"
#include "oirrt/geometry.hpp"

namespace oirrt {

/// A planning query with its world, as stored in scenario files.
struct Scenario {
  World world;
  Config start;
  Config goal;
  double goalRadius = 0.5;
  std::string name;
};

namespace detail {

inline std::size_t lineOfOffset(const std::string &text, std::size_t offset) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i)
    if (text[i] == '\n')
      ++line;
  return line;
}

inline Config readPoint(const nlohmann::json &j, const char *what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() ||
      !j[1].is_number())
    throw ValidationError(std::string(what) + " must be an [x, y] pair");
  Config q{j[0].get<double>(), j[1].get<double>()};
  if (!q.finite())
    throw ValidationError(std::string(what) + " must be finite");
  return q;
}

inline nlohmann::json writePoint(Config q) { return nlohmann::json::array({q.x, q.y}); }

} // namespace detail

/// Parses and validates a scenario document:
///   {name, bounds:{min:[x,y],max:[x,y]},
///    obstacles:[{circle:{center:[x,y],r}} | {polygon:{vertices:[[x,y],...]}}],
///    start:[x,y], goal:[x,y], goal_radius}
/// Throws ParseError for malformed JSON and ValidationError for documents
/// that do not describe a valid query.
inline Scenario loadScenario(const std::string &text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw ParseError(e.what(), detail::lineOfOffset(text, e.byte));
  }
  try {
    if (!doc.is_object())
      throw ValidationError("scenario must be a JSON object");
    if (!doc.contains("bounds"))
      throw ValidationError("scenario needs bounds");
    const auto &b = doc.at("bounds");
    const Box bounds{detail::readPoint(b.at("min"), "bounds.min"),
                     detail::readPoint(b.at("max"), "bounds.max")};
    std::vector<Obstacle> obstacles;
    if (doc.contains("obstacles")) {
      for (const auto &o : doc.at("obstacles")) {
        if (o.contains("circle")) {
          const auto &c = o.at("circle");
          if (!c.at("r").is_number())
            throw ValidationError("circle radius must be a number");
          obstacles.push_back(Obstacle::circle(
              detail::readPoint(c.at("center"), "circle.center"),
              c.at("r").get<double>()));
        } else if (o.contains("polygon")) {
          std::vector<Config> vertices;
          for (const auto &v : o.at("polygon").at("vertices"))
            vertices.push_back(detail::readPoint(v, "polygon vertex"));
          obstacles.push_back(Obstacle::polygon(std::move(vertices)));
        } else {
          throw ValidationError("obstacle must be a circle or a polygon");
        }
      }
    }
    Scenario s{World(bounds, std::move(obstacles)),
               detail::readPoint(doc.at("start"), "start"),
               detail::readPoint(doc.at("goal"), "goal"),
               doc.value("goal_radius", 0.5), doc.value("name", std::string())};
    if (!(s.goalRadius >= 0.0))
      throw ValidationError("goal_radius must be non-negative");
    if (!pointFree(s.world, s.start))
      throw ValidationError("start is not collision-free");
    if (!pointFree(s.world, s.goal))
      throw ValidationError("goal is not collision-free");
    if (s.start == s.goal)
      throw ValidationError("start and goal coincide");
    return s;
  } catch (const nlohmann::json::exception &e) {
    throw ValidationError(std::string("malformed scenario: ") + e.what());
  }
}

inline std::string writeScenario(const Scenario &s) {
  nlohmann::json doc;
  doc["name"] = s.name;
  doc["bounds"] = {{"min", detail::writePoint(s.world.bounds().min)},
                   {"max", detail::writePoint(s.world.bounds().max)}};
  auto obstacles = nlohmann::json::array();
  for (const Obstacle &o : s.world.obstacles()) {
    if (const Circle *c = o.asCircle()) {
      obstacles.push_back(
          {{"circle", {{"center", detail::writePoint(c->center)},
                       {"r", c->radius}}}});
    } else {
      auto vertices = nlohmann::json::array();
      for (Config v : o.asPolygon()->vertices)
        vertices.push_back(detail::writePoint(v));
      obstacles.push_back({{"polygon", {{"vertices", vertices}}}});
    }
  }
  doc["obstacles"] = obstacles;
  doc["start"] = detail::writePoint(s.start);
  doc["goal"] = detail::writePoint(s.goal);
  doc["goal_radius"] = s.goalRadius;
  return doc.dump(2) + "\n";
}

inline std::string readFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void writeFile(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("cannot write " + path);
  out << text;
  if (!out)
    throw IoError("write failed for " + path);
}

inline Scenario loadScenarioFile(const std::string &path) {
  return loadScenario(readFile(path));
}

/// Path files: {"path": [[x, y], ...]} with at least two nodes.
inline Path loadPath(const std::string &text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw ParseError(e.what(), detail::lineOfOffset(text, e.byte));
  }
  if (!doc.is_object() || !doc.contains("path") || !doc["path"].is_array())
    throw ValidationError("path document needs a \"path\" array");
  Path path;
  for (const auto &q : doc["path"])
    path.nodes.push_back(detail::readPoint(q, "path node"));
  if (path.nodes.size() < 2)
    throw ValidationError("a path needs at least two nodes");
  return path;
}

inline std::string writePath(const Path &path) {
  auto nodes = nlohmann::json::array();
  for (Config q : path.nodes)
    nodes.push_back(detail::writePoint(q));
  nlohmann::json doc;
  doc["path"] = nodes;
  doc["cost"] = pathLength(path);
  return doc.dump(2) + "\n";
}

} // namespace oirrt
