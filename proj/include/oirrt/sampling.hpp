#pragma once

#include <cmath>
#include <limits>
#include <numbers>

#include "oirrt/error.hpp"
#include "oirrt/geometry.hpp"
#include "oirrt/rng.hpp"

namespace oirrt {

/// Configurations that could improve a solution of cost cBest between the
/// two foci: {q : |q - focus1| + |q - focus2| <= cBest}.
struct InformedRegion {
  Config focus1;
  Config focus2;
  double cBest = std::numeric_limits<double>::infinity();
  double cMin = 0.0;

  InformedRegion(Config start, Config goal,
                 double best = std::numeric_limits<double>::infinity())
      : focus1(start), focus2(goal), cBest(best), cMin(distance(start, goal)) {}

  bool bounded() const { return std::isfinite(cBest); }

  bool contains(Config q, double tolerance = 0.0) const {
    return distance(q, focus1) + distance(q, focus2) <= cBest + tolerance;
  }
};

inline constexpr double kDegenerateRegionTolerance = 1e-9;
inline constexpr int kMaxBoundsRejections = 10000;

inline Config uniformSample(const World &world, RngStream &rng) {
  const Box &b = world.bounds();
  const double x = rng.uniform(b.min.x, b.max.x);
  const double y = rng.uniform(b.min.y, b.max.y);
  return {x, y};
}

/// Uniform sample from the informed region intersected with the world
/// bounds, or from the whole bounds while cBest is infinite. The ellipse is
/// sampled directly: a point uniform in the unit disk is scaled by the
/// semi-axes, rotated onto the focal axis and moved to the focal midpoint.
inline Config informedSample(const InformedRegion &region, const World &world,
                             RngStream &rng) {
  if (!region.bounded())
    return uniformSample(world, rng);
  if (region.cBest < region.cMin - kDegenerateRegionTolerance)
    throw EmptyRegion("cBest is below the start-goal distance");

  const Config axis = region.focus2 - region.focus1;
  const Box &bounds = world.bounds();

  if (region.cBest <= region.cMin + kDegenerateRegionTolerance) {
    // The ellipse has collapsed onto the focal segment.
    return bounds.clamp(region.focus1 + axis * rng.uniform());
  }

  const Config centre = (region.focus1 + region.focus2) * 0.5;
  const Config u = region.cMin > 0.0 ? axis * (1.0 / region.cMin)
                                     : Config{1.0, 0.0};
  const Config v{-u.y, u.x};
  const double a = region.cBest / 2.0;
  const double b =
      std::sqrt(region.cBest * region.cBest - region.cMin * region.cMin) / 2.0;

  Config candidate = centre;
  for (int attempt = 0; attempt < kMaxBoundsRejections; ++attempt) {
    const double r = std::sqrt(rng.uniform());
    const double theta = 2.0 * std::numbers::pi * rng.uniform();
    const double ex = a * r * std::cos(theta);
    const double ey = b * r * std::sin(theta);
    candidate = centre + u * ex + v * ey;
    if (bounds.contains(candidate))
      return candidate;
  }
  return bounds.clamp(candidate);
}

} // namespace oirrt
