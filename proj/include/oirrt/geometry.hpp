#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "oirrt/error.hpp"

namespace oirrt {

/// A point of the planar configuration space, in meters.
struct Config {
  double x = 0.0;
  double y = 0.0;

  constexpr Config operator+(Config o) const { return {x + o.x, y + o.y}; }
  constexpr Config operator-(Config o) const { return {x - o.x, y - o.y}; }
  constexpr Config operator*(double s) const { return {x * s, y * s}; }
  constexpr bool operator==(const Config &) const = default;

  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

constexpr double dot(Config a, Config b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Config a, Config b) { return a.x * b.y - a.y * b.x; }
inline double norm(Config a) { return std::hypot(a.x, a.y); }
inline double distance(Config a, Config b) { return norm(b - a); }
constexpr double squaredDistance(Config a, Config b) {
  return dot(b - a, b - a);
}

/// Parameter in [0,1] of the point of segment ab closest to p.
inline double closestParameter(Config a, Config b, Config p) {
  const Config ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0)
    return 0.0;
  return std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
}

inline Config closestPointOnSegment(Config a, Config b, Config p) {
  return a + (b - a) * closestParameter(a, b, p);
}

inline double pointSegmentDistance(Config a, Config b, Config p) {
  return distance(p, closestPointOnSegment(a, b, p));
}

/// Axis-aligned rectangle, closed on all sides.
struct Box {
  Config min;
  Config max;

  bool contains(Config q) const {
    return q.x >= min.x && q.x <= max.x && q.y >= min.y && q.y <= max.y;
  }
  bool overlaps(const Box &o) const {
    return !(o.max.x < min.x || o.min.x > max.x || o.max.y < min.y ||
             o.min.y > max.y);
  }
  Config clamp(Config q) const {
    return {std::clamp(q.x, min.x, max.x), std::clamp(q.y, min.y, max.y)};
  }
  double width() const { return max.x - min.x; }
  double height() const { return max.y - min.y; }
  double diameter() const { return std::hypot(width(), height()); }
};

inline Box segmentBox(Config a, Config b) {
  return {{std::min(a.x, b.x), std::min(a.y, b.y)},
          {std::max(a.x, b.x), std::max(a.y, b.y)}};
}

struct Circle {
  Config center;
  double radius = 0.0;
};

/// Convex polygon with counter-clockwise vertices. Use makePolygon to
/// construct a validated instance.
struct ConvexPolygon {
  std::vector<Config> vertices;
};

/// Closed obstacle: its boundary counts as collision.
class Obstacle {
public:
  static Obstacle circle(Config center, double radius) {
    if (!center.finite() || !std::isfinite(radius) || !(radius > 0.0))
      throw ValidationError("circle radius must be strictly positive");
    Obstacle o;
    o.shape_ = Circle{center, radius};
    o.box_ = {{center.x - radius, center.y - radius},
              {center.x + radius, center.y + radius}};
    return o;
  }

  static Obstacle polygon(std::vector<Config> vertices) {
    const std::size_t n = vertices.size();
    if (n < 3)
      throw ValidationError("polygon needs at least 3 vertices");
    double area2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!vertices[i].finite())
        throw ValidationError("polygon vertex is not finite");
      area2 += cross(vertices[i], vertices[(i + 1) % n]);
    }
    if (!(area2 > 1e-12))
      throw ValidationError(
          "polygon must be counter-clockwise with non-zero area");
    // Every other vertex must lie on the left of (or on) each edge.
    for (std::size_t i = 0; i < n; ++i) {
      const Config a = vertices[i];
      const Config b = vertices[(i + 1) % n];
      if (a == b)
        throw ValidationError("polygon has a repeated vertex");
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i || j == (i + 1) % n)
          continue;
        if (cross(b - a, vertices[j] - a) < -1e-12 * distance(a, b))
          throw ValidationError("polygon is not convex");
      }
    }
    Obstacle o;
    Box box{vertices.front(), vertices.front()};
    for (Config v : vertices) {
      box.min = {std::min(box.min.x, v.x), std::min(box.min.y, v.y)};
      box.max = {std::max(box.max.x, v.x), std::max(box.max.y, v.y)};
    }
    o.box_ = box;
    o.shape_ = ConvexPolygon{std::move(vertices)};
    return o;
  }

  const std::variant<Circle, ConvexPolygon> &shape() const { return shape_; }
  const Circle *asCircle() const { return std::get_if<Circle>(&shape_); }
  const ConvexPolygon *asPolygon() const {
    return std::get_if<ConvexPolygon>(&shape_);
  }
  const Box &box() const { return box_; }

  /// True when q lies in the closed obstacle.
  bool contains(Config q) const {
    if (!box_.contains(q))
      return false;
    if (const Circle *c = asCircle())
      return squaredDistance(c->center, q) <= c->radius * c->radius;
    const auto &v = asPolygon()->vertices;
    for (std::size_t i = 0, n = v.size(); i < n; ++i)
      if (cross(v[(i + 1) % n] - v[i], q - v[i]) < 0.0)
        return false;
    return true;
  }

  /// True when the closed segment ab touches the closed obstacle.
  bool intersects(Config a, Config b) const {
    if (!box_.overlaps(segmentBox(a, b)))
      return false;
    if (const Circle *c = asCircle())
      return pointSegmentDistance(a, b, c->center) <= c->radius;
    if (a == b)
      return contains(a);
    // Separating axes: the polygon edge normals plus the segment normal.
    const auto &v = asPolygon()->vertices;
    const std::size_t n = v.size();
    auto separated = [&](Config axis) {
      double pmin = std::numeric_limits<double>::infinity();
      double pmax = -pmin;
      for (Config p : v) {
        const double d = dot(axis, p);
        pmin = std::min(pmin, d);
        pmax = std::max(pmax, d);
      }
      const double sa = dot(axis, a);
      const double sb = dot(axis, b);
      return std::max(sa, sb) < pmin || std::min(sa, sb) > pmax;
    };
    for (std::size_t i = 0; i < n; ++i) {
      const Config e = v[(i + 1) % n] - v[i];
      if (separated({e.y, -e.x}))
        return false;
    }
    const Config d = b - a;
    return !separated({-d.y, d.x});
  }

  /// Closest boundary point to q and the outward unit normal there.
  std::pair<Config, Config> closestBoundaryPoint(Config q) const {
    if (const Circle *c = asCircle()) {
      Config dir = q - c->center;
      const double len = norm(dir);
      dir = len > 0.0 ? dir * (1.0 / len) : Config{1.0, 0.0};
      return {c->center + dir * c->radius, dir};
    }
    const auto &v = asPolygon()->vertices;
    const std::size_t n = v.size();
    double best = std::numeric_limits<double>::infinity();
    Config bestPoint = v.front();
    Config bestNormal{1.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      const Config a = v[i];
      const Config b = v[(i + 1) % n];
      const Config p = closestPointOnSegment(a, b, q);
      const double d = squaredDistance(p, q);
      if (d < best) {
        best = d;
        bestPoint = p;
        const Config e = b - a;
        bestNormal = Config{e.y, -e.x} * (1.0 / norm(e));
      }
    }
    const Config away = q - bestPoint;
    const double len = norm(away);
    // Outside a vertex the normal follows the direction to q.
    if (len > 1e-12 && !contains(q))
      bestNormal = away * (1.0 / len);
    return {bestPoint, bestNormal};
  }

  /// Penetration depth of segment ab and the segment parameter where it is
  /// reached; nullopt when the segment is disjoint from the obstacle.
  std::optional<std::pair<double, double>> penetration(Config a,
                                                       Config b) const {
    if (!intersects(a, b))
      return std::nullopt;
    if (const Circle *c = asCircle()) {
      const double s = closestParameter(a, b, c->center);
      return std::pair{c->radius - distance(a + (b - a) * s, c->center), s};
    }
    const auto &v = asPolygon()->vertices;
    const std::size_t n = v.size();
    // Clip the segment against each inner half-plane.
    double t0 = 0.0, t1 = 1.0;
    const Config d = b - a;
    for (std::size_t i = 0; i < n; ++i) {
      const Config e = v[(i + 1) % n] - v[i];
      const double num = cross(e, a - v[i]);
      const double den = cross(e, d);
      if (den == 0.0)
        continue;
      const double t = -num / den;
      if (den > 0.0)
        t0 = std::max(t0, t);
      else
        t1 = std::min(t1, t);
    }
    if (t1 < t0)
      t1 = t0;
    const double s = 0.5 * (t0 + t1);
    const Config p = a + d * s;
    double depth = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const Config e = v[(i + 1) % n] - v[i];
      depth = std::min(depth, cross(e, p - v[i]) / norm(e));
    }
    return std::pair{std::max(depth, 0.0), s};
  }

private:
  Obstacle() = default;

  std::variant<Circle, ConvexPolygon> shape_;
  Box box_{};
};

/// Bounded free space with obstacles. Immutable after construction, so all
/// queries are safe to share between threads.
class World {
public:
  World(Box bounds, std::vector<Obstacle> obstacles = {})
      : bounds_(bounds), obstacles_(std::move(obstacles)) {
    if (!bounds.min.finite() || !bounds.max.finite() ||
        !(bounds.min.x < bounds.max.x) || !(bounds.min.y < bounds.max.y))
      throw ValidationError("world bounds must satisfy min < max");
  }

  const Box &bounds() const { return bounds_; }
  const std::vector<Obstacle> &obstacles() const { return obstacles_; }

private:
  Box bounds_;
  std::vector<Obstacle> obstacles_;
};

/// Ordered node sequence from start to goal.
struct Path {
  std::vector<Config> nodes;

  std::size_t size() const { return nodes.size(); }
  bool operator==(const Path &) const = default;
};

inline bool pointFree(const World &world, Config q) {
  if (!world.bounds().contains(q))
    return false;
  for (const Obstacle &o : world.obstacles())
    if (o.contains(q))
      return false;
  return true;
}

inline bool segmentFree(const World &world, Config a, Config b) {
  if (!world.bounds().contains(a) || !world.bounds().contains(b))
    return false;
  for (const Obstacle &o : world.obstacles())
    if (o.intersects(a, b))
      return false;
  return true;
}

inline double pathLength(const Path &path) {
  double total = 0.0;
  for (std::size_t i = 1; i < path.nodes.size(); ++i)
    total += distance(path.nodes[i - 1], path.nodes[i]);
  return total;
}

inline bool pathFree(const World &world, const Path &path) {
  if (path.nodes.size() < 2)
    return path.nodes.size() == 1 && pointFree(world, path.nodes.front());
  for (std::size_t i = 1; i < path.nodes.size(); ++i)
    if (!segmentFree(world, path.nodes[i - 1], path.nodes[i]))
      return false;
  return true;
}

} // namespace oirrt
