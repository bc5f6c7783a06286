#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "oirrt/clock.hpp"
#include "oirrt/convergence.hpp"
#include "oirrt/error.hpp"
#include "oirrt/geometry.hpp"
#include "oirrt/rng.hpp"
#include "oirrt/sampling.hpp"
#include "oirrt/tree.hpp"

namespace oirrt {

/// A single planning query.
struct Problem {
  const World &world;
  Config start;
  Config goal;
};

struct PlannerParams {
  double step = 2.0;        ///< maximum extension length (eta), meters
  double goalRadius = 0.5;  ///< a node this close to the goal may close a path
  double goalBias = 0.05;   ///< probability of sampling the goal itself
  std::size_t k = 10;       ///< neighbours considered by the informed RRT
  double rrtStarGamma = 0.0;   ///< radius constant; 0 means 2 * bounds diameter
  double timeBudget = 5.0;     ///< seconds of planning per run
  double maxTimePerTree = 0.0; ///< informed RRT; 0 means timeBudget / 15
  std::optional<std::size_t> maxIterations; ///< unbounded when empty

  void validate() const {
    if (!(step > 0.0))
      throw ValidationError("step must be positive");
    if (!(goalRadius >= 0.0))
      throw ValidationError("goal radius must be non-negative");
    if (!(goalBias >= 0.0 && goalBias < 1.0))
      throw ValidationError("goal bias must be in [0, 1)");
    if (k == 0)
      throw ValidationError("k must be positive");
    if (rrtStarGamma < 0.0 || maxTimePerTree < 0.0 || !(timeBudget >= 0.0))
      throw ValidationError("planner constants must be non-negative");
    if (maxIterations && *maxIterations == 0)
      throw ValidationError("maxIterations must be positive");
  }

  double gamma(const World &world) const {
    return rrtStarGamma > 0.0 ? rrtStarGamma : 2.0 * world.bounds().diameter();
  }

  double treeTime() const {
    return maxTimePerTree > 0.0 ? maxTimePerTree : timeBudget / 15.0;
  }
};

struct Solution {
  Path path;
  double rawCost = kInfinity;
  double foundAt = 0.0;
};

/// Called with every new raw solution; returns the cost to feed into c_best.
using SolutionHook = std::function<double(const Path &raw, double rawCost)>;

/// Observes every sample together with the c_best that produced it.
using SampleObserver = std::function<void(Config sample, double cBest)>;

struct PlannerHooks {
  SolutionHook onSolution;
  SampleObserver onSample;
};

struct PlanResult {
  Tree tree;
  std::optional<Solution> solution; ///< best raw solution
  ConvergenceRecord record;         ///< c_best over time
  std::size_t iterations = 0;
  std::size_t treesGrown = 0;
};

enum class PlannerKind { Rrt, RrtStar, IbRrt, IknRrt, IRrtStar };

inline std::string_view toString(PlannerKind kind) {
  switch (kind) {
  case PlannerKind::Rrt:
    return "rrt";
  case PlannerKind::RrtStar:
    return "rrt-star";
  case PlannerKind::IbRrt:
    return "ib-rrt";
  case PlannerKind::IknRrt:
    return "ikn-rrt";
  case PlannerKind::IRrtStar:
    return "i-rrt-star";
  }
  return "?";
}

inline PlannerKind parsePlannerKind(std::string_view name) {
  for (PlannerKind k : {PlannerKind::Rrt, PlannerKind::RrtStar,
                        PlannerKind::IbRrt, PlannerKind::IknRrt,
                        PlannerKind::IRrtStar})
    if (toString(k) == name)
      return k;
  throw UnknownKind("unknown planner: " + std::string(name));
}

inline bool checkSegment(const World &world, Config a, Config b,
                         Clock &clock) {
  clock.charge(Work::SegmentCheck);
  return segmentFree(world, a, b);
}

/// Point at distance min(eta, |toward - from|) from `from` towards `toward`.
inline Config steer(Config from, Config toward, double eta) {
  const double d = distance(from, toward);
  if (d <= eta)
    return toward;
  return from + (toward - from) * (eta / d);
}

/// Steers from qNear towards qSamp through the straight local path; fails
/// on a zero-length or colliding edge.
inline std::optional<Config> newConfig(const World &world, Config qNear,
                                       Config qSamp, double eta,
                                       Clock &clock) {
  const Config qNew = steer(qNear, qSamp, eta);
  if (qNew == qNear)
    return std::nullopt;
  if (!checkSegment(world, qNear, qNew, clock))
    return std::nullopt;
  return qNew;
}

/// One basic RRT extension; returns the inserted node, if any.
inline std::optional<NodeId> extendRRT(Tree &tree, const World &world,
                                       Config qSamp,
                                       const PlannerParams &params,
                                       Clock &clock) {
  clock.charge(Work::NeighbourQuery);
  const NodeId nearest = tree.nearestNeighbour(qSamp);
  const auto qNew =
      newConfig(world, tree.config(nearest), qSamp, params.step, clock);
  if (!qNew)
    return std::nullopt;
  return tree.insertNode(nearest, *qNew);
}

/// Cheapest collision-free parent for qNew among qNearest and qNear.
inline NodeId chooseParent(const Tree &tree, const World &world,
                           const std::vector<NodeId> &qNear, NodeId qNearest,
                           Config qNew, Clock &clock,
                           bool nearestKnownFree = false) {
  std::vector<std::pair<double, NodeId>> candidates;
  candidates.reserve(qNear.size() + 1);
  candidates.emplace_back(
      tree.cost(qNearest) + distance(tree.config(qNearest), qNew), qNearest);
  for (NodeId id : qNear)
    if (id != qNearest)
      candidates.emplace_back(tree.cost(id) + distance(tree.config(id), qNew),
                              id);
  std::sort(candidates.begin(), candidates.end());
  for (const auto &[cost, id] : candidates) {
    if (id == qNearest && nearestKnownFree)
      return id;
    if (checkSegment(world, tree.config(id), qNew, clock))
      return id;
  }
  throw NoParent("no candidate parent has a collision-free edge");
}

/// Re-parents neighbours through qNewId where that is cheaper and free.
/// Returns the number of rewired nodes.
inline std::size_t rewire(Tree &tree, const World &world,
                          const std::vector<NodeId> &qNear, NodeId qNewId,
                          Clock &clock) {
  std::size_t rewired = 0;
  const Config qNew = tree.config(qNewId);
  for (NodeId id : qNear) {
    if (id == qNewId || tree.parent(qNewId) == id)
      continue;
    const double viaNew = tree.cost(qNewId) + distance(qNew, tree.config(id));
    if (!(viaNew < tree.cost(id)))
      continue;
    if (!checkSegment(world, qNew, tree.config(id), clock))
      continue;
    tree.reparent(id, qNewId);
    ++rewired;
  }
  return rewired;
}

namespace detail {

inline Config drawSample(const Problem &problem, const PlannerParams &params,
                         double cBest, RngStream &rng, Clock &clock,
                         const PlannerHooks &hooks) {
  clock.charge(Work::Sample);
  Config q;
  if (params.goalBias > 0.0 && rng.uniform() < params.goalBias)
    q = problem.goal;
  else
    q = informedSample(InformedRegion(problem.start, problem.goal, cBest),
                       problem.world, rng);
  if (hooks.onSample)
    hooks.onSample(q, cBest);
  return q;
}

/// Cost of closing a path from `id` to the goal, or nullopt.
inline std::optional<double> goalConnection(const Tree &tree,
                                            const Problem &problem,
                                            const PlannerParams &params,
                                            NodeId id, Clock &clock) {
  const Config q = tree.config(id);
  const double d = distance(q, problem.goal);
  if (d > params.goalRadius)
    return std::nullopt;
  if (d > 0.0 && !checkSegment(problem.world, q, problem.goal, clock))
    return std::nullopt;
  return tree.cost(id) + d;
}

inline Path extractPath(const Tree &tree, NodeId id, Config goal) {
  Path path{tree.branch(id)};
  if (!(path.nodes.back() == goal))
    path.nodes.push_back(goal);
  if (path.nodes.size() == 1)
    path.nodes.push_back(goal);
  return path;
}

inline bool withinBudget(const PlannerParams &params, const Clock &clock,
                         std::size_t iterations) {
  if (params.maxIterations && iterations >= *params.maxIterations)
    return false;
  return clock.now() < params.timeBudget;
}

/// Shared reporting of a new raw solution: runs the hook, updates c_best and
/// the trace. Returns the cost the hook assigned.
inline double reportSolution(PlanResult &result, Solution solution,
                             double &cBest, Clock &clock,
                             const PlannerHooks &hooks) {
  const double raw = solution.rawCost;
  const double fed = hooks.onSolution ? hooks.onSolution(solution.path, raw)
                                      : raw;
  if (!result.solution || raw < result.solution->rawCost)
    result.solution = std::move(solution);
  cBest = std::min(cBest, fed);
  result.record.improve(clock.now(), cBest);
  return fed;
}

inline void checkProblem(const Problem &problem, const PlannerParams &params) {
  params.validate();
  if (!problem.goal.finite() || !pointFree(problem.world, problem.goal))
    throw ValidationError("goal configuration is not collision-free");
}

/// RRT* growth shared by the plain and informed variants.
inline PlanResult growRRTStar(const Problem &problem,
                              const PlannerParams &params, RngStream &rng,
                              Clock &clock, bool informed,
                              const PlannerHooks &hooks) {
  checkProblem(problem, params);
  PlanResult result{Tree(problem.world.bounds(), params.step), {}, {}};
  result.record.budget = params.timeBudget;
  Tree &tree = result.tree;
  tree.initialise(problem.world, problem.start);

  const double gamma = params.gamma(problem.world);
  double cBest = kInfinity;
  double treeBest = kInfinity;
  std::vector<NodeId> goalNodes;

  while (withinBudget(params, clock, result.iterations)) {
    ++result.iterations;
    clock.charge(Work::Iteration);
    const Config qSamp = drawSample(
        problem, params, informed ? cBest : kInfinity, rng, clock, hooks);

    clock.charge(Work::NeighbourQuery);
    const NodeId nearest = tree.nearestNeighbour(qSamp);
    const Config qNew = steer(tree.config(nearest), qSamp, params.step);
    if (qNew == tree.config(nearest))
      continue;
    if (!checkSegment(problem.world, tree.config(nearest), qNew, clock))
      continue;

    const double n = static_cast<double>(tree.size());
    const double radius =
        std::min(gamma * std::sqrt(std::log(n) / n), params.step);
    clock.charge(Work::NeighbourQuery);
    const std::vector<NodeId> qNear = tree.near(qNew, radius);
    clock.charge(Work::NeighbourVisit, qNear.size());

    const NodeId parent = chooseParent(tree, problem.world, qNear, nearest,
                                       qNew, clock, /*nearestKnownFree=*/true);
    const NodeId id = tree.insertNode(parent, qNew);
    const std::size_t rewired = rewire(tree, problem.world, qNear, id, clock);

    bool changed = false;
    if (goalConnection(tree, problem, params, id, clock)) {
      goalNodes.push_back(id);
      changed = true;
    }
    if (!changed && rewired == 0)
      continue;
    double best = treeBest;
    NodeId bestNode = kNoNode;
    for (NodeId g : goalNodes) {
      const double c = tree.cost(g) + distance(tree.config(g), problem.goal);
      if (c < best) {
        best = c;
        bestNode = g;
      }
    }
    if (best < treeBest) {
      treeBest = best;
      reportSolution(result,
                     {extractPath(tree, bestNode, problem.goal), best,
                      clock.now()},
                     cBest, clock, hooks);
    }
  }
  return result;
}

} // namespace detail

/// Basic RRT: grows until the first solution or the budget expires.
inline PlanResult runRRT(const Problem &problem, const PlannerParams &params,
                         RngStream &rng, Clock &clock,
                         const PlannerHooks &hooks = {}) {
  detail::checkProblem(problem, params);
  PlanResult result{Tree(problem.world.bounds(), params.step), {}, {}};
  result.record.budget = params.timeBudget;
  result.treesGrown = 1;
  result.tree.initialise(problem.world, problem.start);
  double cBest = kInfinity;
  while (detail::withinBudget(params, clock, result.iterations)) {
    ++result.iterations;
    clock.charge(Work::Iteration);
    const Config qSamp =
        detail::drawSample(problem, params, kInfinity, rng, clock, hooks);
    const auto id = extendRRT(result.tree, problem.world, qSamp, params, clock);
    if (!id)
      continue;
    if (const auto cost =
            detail::goalConnection(result.tree, problem, params, *id, clock)) {
      detail::reportSolution(
          result,
          {detail::extractPath(result.tree, *id, problem.goal), *cost,
           clock.now()},
          cBest, clock, hooks);
      break;
    }
  }
  return result;
}

/// RRT* with choose-parent and rewiring; keeps improving until the budget.
inline PlanResult runRRTStar(const Problem &problem,
                             const PlannerParams &params, RngStream &rng,
                             Clock &clock, const PlannerHooks &hooks = {}) {
  auto result = detail::growRRTStar(problem, params, rng, clock, false, hooks);
  result.treesGrown = 1;
  return result;
}

/// RRT* sampling the informed subset of the current c_best.
inline PlanResult runInformedRRTStar(const Problem &problem,
                                     const PlannerParams &params,
                                     RngStream &rng, Clock &clock,
                                     const PlannerHooks &hooks = {}) {
  auto result = detail::growRRTStar(problem, params, rng, clock, true, hooks);
  result.treesGrown = 1;
  return result;
}

/// Extension of the informed RRT: tries the k nearest nodes in ascending
/// order of cost-from-root plus edge length and inserts under the first one
/// with a collision-free edge. With k = 1 this is the basic RRT extension.
inline std::optional<NodeId> extendInformedRRT(Tree &tree, const World &world,
                                               Config qSamp,
                                               const PlannerParams &params,
                                               Clock &clock) {
  clock.charge(Work::NeighbourQuery);
  const std::vector<NodeId> qNear = tree.kNearestNeighbours(qSamp, params.k);
  clock.charge(Work::NeighbourVisit, qNear.size());
  std::vector<std::pair<double, NodeId>> order;
  order.reserve(qNear.size());
  for (NodeId id : qNear) {
    const Config from = tree.config(id);
    order.emplace_back(
        tree.cost(id) + distance(from, steer(from, qSamp, params.step)), id);
  }
  std::sort(order.begin(), order.end());
  for (const auto &[cost, id] : order)
    if (const auto qNew =
            newConfig(world, tree.config(id), qSamp, params.step, clock))
      return tree.insertNode(id, *qNew);
  return std::nullopt;
}

/// Informed RRT: grows a fresh tree every maxTimePerTree seconds, sampling
/// the informed subset of the c_best carried across trees. `result.tree` is
/// the tree that produced the best c_best (the last tree if none did).
inline PlanResult runInformedRRT(const Problem &problem,
                                 const PlannerParams &params, RngStream &rng,
                                 Clock &clock,
                                 const PlannerHooks &hooks = {}) {
  detail::checkProblem(problem, params);
  const Box &bounds = problem.world.bounds();
  PlanResult result{Tree(bounds, params.step), {}, {}};
  result.record.budget = params.timeBudget;
  Tree tree(bounds, params.step);
  bool haveBestTree = false;
  double cBest = kInfinity;

  while (detail::withinBudget(params, clock, result.iterations)) {
    tree.reInitialise(problem.world, problem.start);
    ++result.treesGrown;
    const double treeStart = clock.now();
    double treeBest = kInfinity;
    bool bestTree = false;
    while (clock.now() - treeStart < params.treeTime() &&
           detail::withinBudget(params, clock, result.iterations)) {
      ++result.iterations;
      clock.charge(Work::Iteration);
      const Config qSamp =
          detail::drawSample(problem, params, cBest, rng, clock, hooks);
      const auto id =
          extendInformedRRT(tree, problem.world, qSamp, params, clock);
      if (!id)
        continue;
      const auto cost =
          detail::goalConnection(tree, problem, params, *id, clock);
      if (!cost || !(*cost < treeBest))
        continue;
      treeBest = *cost;
      const double before = cBest;
      detail::reportSolution(
          result,
          {detail::extractPath(tree, *id, problem.goal), *cost, clock.now()},
          cBest, clock, hooks);
      if (cBest < before)
        bestTree = true;
    }
    if (bestTree || !haveBestTree) {
      std::swap(result.tree, tree);
      haveBestTree = haveBestTree || bestTree;
    }
  }
  if (result.tree.empty())
    result.tree.initialise(problem.world, problem.start);
  return result;
}

} // namespace oirrt
