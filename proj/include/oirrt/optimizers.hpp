#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "oirrt/clock.hpp"
#include "oirrt/convergence.hpp"
#include "oirrt/error.hpp"
#include "oirrt/geometry.hpp"
#include "oirrt/gradient.hpp"
#include "oirrt/planners.hpp"
#include "oirrt/rng.hpp"

namespace oirrt {

/// Every optimizer stops at the earlier of start + timeLimit and the
/// absolute deadline, returning its best path so far.
struct OptimizerBudget {
  double timeLimit = kInfinity;
  double deadline = kInfinity;

  double end(const Clock &clock) const {
    return std::min(clock.now() + timeLimit, deadline);
  }
};

/// Forward sweeps removing q_{i+1} whenever q_i sees q_{i+2}, repeated
/// until a sweep removes nothing (a removal can open an earlier shortcut).
inline Path prunePath(const World &world, const Path &path, Clock &clock,
                      const OptimizerBudget &budget = {}) {
  const double end = budget.end(clock);
  std::vector<Config> nodes = path.nodes;
  for (bool removed = true; removed;) {
    removed = false;
    std::size_t i = 0;
    while (i + 2 < nodes.size()) {
      if (clock.now() >= end)
        return {std::move(nodes)};
      if (checkSegment(world, nodes[i], nodes[i + 2], clock)) {
        nodes.erase(nodes.begin() + static_cast<std::ptrdiff_t>(i + 1));
        removed = true;
      } else {
        ++i;
      }
    }
  }
  return {std::move(nodes)};
}

inline Path prunePath(const World &world, const Path &path) {
  VirtualClock clock;
  return prunePath(world, path, clock);
}

/// Splits every segment into equal pieces no longer than delta.
inline Path discretize(const Path &path, double delta) {
  Path out;
  if (path.nodes.empty())
    return out;
  out.nodes.push_back(path.nodes.front());
  for (std::size_t i = 1; i < path.nodes.size(); ++i) {
    const Config a = path.nodes[i - 1];
    const Config b = path.nodes[i];
    const auto pieces = static_cast<std::size_t>(
        std::max(1.0, std::ceil(distance(a, b) / delta)));
    for (std::size_t p = 1; p < pieces; ++p)
      out.nodes.push_back(a + (b - a) * (static_cast<double>(p) /
                                         static_cast<double>(pieces)));
    out.nodes.push_back(b);
  }
  return out;
}

struct ShortcutOptions {
  double delta = 1.0;               ///< discretisation resolution, meters
  std::size_t maxAttempts = 200000; ///< stops an unbounded budget
};

/// Random shortcut: discretise at delta, then repeatedly join two random
/// non-consecutive nodes by a straight segment when that is collision-free
/// and shorter. The replacing segment is discretised too, so later
/// shortcuts keep the same resolution.
inline Path randomShortcut(const World &world, const Path &path,
                           const OptimizerBudget &budget, RngStream &rng,
                           const ShortcutOptions &options, Clock &clock) {
  if (!(options.delta > 0.0))
    throw ValidationError("shortcut resolution must be positive");
  const double end = budget.end(clock);
  std::vector<Config> nodes = discretize(path, options.delta).nodes;
  // prefix[i] is the path length from node 0 to node i.
  std::vector<double> prefix;
  auto rebuildPrefix = [&] {
    prefix.assign(nodes.size(), 0.0);
    for (std::size_t i = 1; i < nodes.size(); ++i)
      prefix[i] = prefix[i - 1] + distance(nodes[i - 1], nodes[i]);
  };
  rebuildPrefix();

  for (std::size_t attempt = 0; attempt < options.maxAttempts; ++attempt) {
    if (nodes.size() < 3 || clock.now() >= end)
      break;
    clock.charge(Work::Iteration);
    std::size_t i = rng.index(nodes.size());
    std::size_t j = rng.index(nodes.size());
    if (i > j)
      std::swap(i, j);
    if (j < i + 2)
      continue;
    const double direct = distance(nodes[i], nodes[j]);
    if (!(direct < prefix[j] - prefix[i] - 1e-12))
      continue;
    if (!checkSegment(world, nodes[i], nodes[j], clock))
      continue;
    const Path bridge = discretize(Path{{nodes[i], nodes[j]}}, options.delta);
    std::vector<Config> next;
    next.reserve(nodes.size());
    next.insert(next.end(), nodes.begin(),
                nodes.begin() + static_cast<std::ptrdiff_t>(i));
    next.insert(next.end(), bridge.nodes.begin(), bridge.nodes.end());
    next.insert(next.end(),
                nodes.begin() + static_cast<std::ptrdiff_t>(j + 1),
                nodes.end());
    nodes = std::move(next);
    rebuildPrefix();
  }
  return {std::move(nodes)};
}

inline constexpr double kContactTolerance = 1e-6;

/// Wrapping process: sweep forward, removing q_{i+1} if q_i sees q_{i+2},
/// otherwise pulling q_{i+1} towards the chord q_i q_{i+2} by bisection
/// until its incident segments touch an obstacle within `margin`.
inline Path wrapPath(const World &world, const Path &path, Clock &clock,
                     const OptimizerBudget &budget = {},
                     double margin = kContactTolerance) {
  const double end = budget.end(clock);
  if (clock.now() >= end)
    return path;
  std::vector<Config> nodes = path.nodes;
  std::size_t i = 0;
  while (i + 2 < nodes.size()) {
    if (clock.now() >= end)
      break;
    const Config a = nodes[i];
    const Config c = nodes[i + 2];
    if (checkSegment(world, a, c, clock)) {
      nodes.erase(nodes.begin() + static_cast<std::ptrdiff_t>(i + 1));
      continue;
    }
    const Config from = nodes[i + 1];
    const Config target = closestPointOnSegment(a, c, from);
    const double travel = distance(from, target);
    double lo = 0.0;
    double hi = 1.0;
    while ((hi - lo) * travel > margin && clock.now() < end) {
      const double mid = 0.5 * (lo + hi);
      const Config p = from + (target - from) * mid;
      if (checkSegment(world, a, p, clock) && checkSegment(world, p, c, clock))
        lo = mid;
      else
        hi = mid;
    }
    nodes[i + 1] = from + (target - from) * lo;
    ++i;
  }
  return {std::move(nodes)};
}

enum class OptimizerKind { None, Prune, Rs, Wrap, Gb };

inline std::string_view toString(OptimizerKind kind) {
  switch (kind) {
  case OptimizerKind::None:
    return "none";
  case OptimizerKind::Prune:
    return "prune";
  case OptimizerKind::Rs:
    return "rs";
  case OptimizerKind::Wrap:
    return "wrap";
  case OptimizerKind::Gb:
    return "gb";
  }
  return "?";
}

inline OptimizerKind parseOptimizerKind(std::string_view name) {
  for (OptimizerKind k : {OptimizerKind::None, OptimizerKind::Prune,
                          OptimizerKind::Rs, OptimizerKind::Wrap,
                          OptimizerKind::Gb})
    if (toString(k) == name)
      return k;
  throw UnknownKind("unknown optimizer: " + std::string(name));
}

struct OptimizerSettings {
  ShortcutOptions shortcut;
  gb::Params gradient;
  double contactMargin = kContactTolerance;
};

/// Uniform dispatch with the shared anytime budget. The result is never
/// longer than the input.
inline Path optimize(OptimizerKind kind, const World &world, const Path &path,
                     const OptimizerBudget &budget, RngStream &rng,
                     Clock &clock, const OptimizerSettings &settings = {}) {
  if (budget.end(clock) <= clock.now())
    return path;
  Path out;
  switch (kind) {
  case OptimizerKind::None:
    return path;
  case OptimizerKind::Prune:
    out = prunePath(world, path, clock, budget);
    break;
  case OptimizerKind::Rs:
    out = randomShortcut(world, path, budget, rng, settings.shortcut, clock);
    break;
  case OptimizerKind::Wrap:
    out = wrapPath(world, path, clock, budget, settings.contactMargin);
    break;
  case OptimizerKind::Gb:
    out = gb::optimize(world, path, settings.gradient, clock,
                       budget.end(clock));
    break;
  default:
    throw UnknownKind("unknown optimizer kind");
  }
  return pathLength(out) <= pathLength(path) ? out : path;
}

} // namespace oirrt
