#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "oirrt/clock.hpp"
#include "oirrt/convergence.hpp"
#include "oirrt/error.hpp"
#include "oirrt/optimizers.hpp"
#include "oirrt/planners.hpp"
#include "oirrt/rng.hpp"

namespace oirrt {

/// Predicts the random-shortcut time limit from the discretised node count
/// by ordinary least squares over the convergence times of other
/// optimizers.
class RsTimeLimitModel {
public:
  struct Sample {
    std::size_t nodeCount = 0;
    double seconds = 0.0;
  };

  explicit RsTimeLimitModel(double defaultLimit = 0.05)
      : defaultLimit_(defaultLimit) {}

  void record(std::size_t nodeCount, double seconds) {
    samples_.push_back({nodeCount, seconds});
    refit();
  }

  double predict(std::size_t nodeCount) const {
    if (samples_.size() < 2)
      return defaultLimit_;
    return std::max(slope_ * static_cast<double>(nodeCount) + intercept_,
                    kMinimumLimit);
  }

  const std::vector<Sample> &samples() const { return samples_; }
  double slope() const { return slope_; }
  double intercept() const { return intercept_; }
  double defaultLimit() const { return defaultLimit_; }

  static constexpr double kMinimumLimit = 1e-3;

private:
  void refit() {
    const double n = static_cast<double>(samples_.size());
    double meanX = 0.0, meanY = 0.0;
    for (const auto &s : samples_) {
      meanX += static_cast<double>(s.nodeCount);
      meanY += s.seconds;
    }
    meanX /= n;
    meanY /= n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto &s : samples_) {
      const double dx = static_cast<double>(s.nodeCount) - meanX;
      sxx += dx * dx;
      sxy += dx * (s.seconds - meanY);
    }
    // All samples at one node count: the fit degenerates to their mean.
    slope_ = sxx > 0.0 ? sxy / sxx : 0.0;
    intercept_ = meanY - slope_ * meanX;
  }

  double defaultLimit_;
  double slope_ = 0.0;
  double intercept_ = 0.0;
  std::vector<Sample> samples_;
};

/// Best optimised path of a run and its c_best trace.
struct BestSolutionStore {
  Path bestPath;
  double bestCost = kInfinity;
  ConvergenceRecord history;

  bool found() const { return bestCost < kInfinity; }
};

struct CompositionSettings {
  OptimizerSettings optimizer;
  double rsDefaultLimit = 0.05;
  /// Seed the RS model with one prune, wrap and gb run on the first path.
  bool calibrateRs = true;
};

struct OptimisedResult {
  BestSolutionStore store;
  PlanResult plan;
  RsTimeLimitModel model;
  std::size_t optimizerCalls = 0;
};

/// Dispatches to the planner for `kind`.
inline PlanResult runPlanner(PlannerKind kind, const Problem &problem,
                             PlannerParams params, RngStream &rng,
                             Clock &clock, const PlannerHooks &hooks = {}) {
  switch (kind) {
  case PlannerKind::Rrt:
    return runRRT(problem, params, rng, clock, hooks);
  case PlannerKind::RrtStar:
    return runRRTStar(problem, params, rng, clock, hooks);
  case PlannerKind::IbRrt:
    params.k = 1;
    return runInformedRRT(problem, params, rng, clock, hooks);
  case PlannerKind::IknRrt:
    if (params.k < 2)
      throw ValidationError("ikn-rrt needs k > 1");
    return runInformedRRT(problem, params, rng, clock, hooks);
  case PlannerKind::IRrtStar:
    return runInformedRRTStar(problem, params, rng, clock, hooks);
  }
  throw UnknownKind("unknown planner kind");
}

/// Optimised informed planning: every new raw solution is optimised before
/// its cost is used as c_best. Optimised paths live in the store only; the
/// planning tree is never modified by the optimizer.
inline OptimisedResult runOptimisedInformed(
    PlannerKind plannerKind, OptimizerKind optimizerKind,
    const Problem &problem, const PlannerParams &params, RngStream &rng,
    Clock &clock, const CompositionSettings &settings = {},
    const SampleObserver &onSample = {}) {
  if (!problem.start.finite() || !pointFree(problem.world, problem.start))
    throw ValidationError("start configuration is not collision-free");
  OptimisedResult result{{}, {Tree(problem.world.bounds()), {}, {}},
                         RsTimeLimitModel(settings.rsDefaultLimit)};
  // Optimizer randomness is drawn from its own stream so that enabling an
  // optimizer never perturbs the planner's sample sequence.
  RngStream optimizerRng(RngStream::splitmix64(rng.seed() ^ 0x6f707469ULL));
  const OptimizerSettings &opt = settings.optimizer;
  const double delta = opt.shortcut.delta;
  bool calibrated = !settings.calibrateRs;

  auto timed = [&](OptimizerKind kind, const Path &raw,
                   const OptimizerBudget &budget) {
    const double t0 = clock.now();
    Path out = optimize(kind, problem.world, raw, budget, optimizerRng, clock,
                        opt);
    return std::pair{std::move(out), clock.now() - t0};
  };

  PlannerHooks hooks;
  hooks.onSample = onSample;
  hooks.onSolution = [&](const Path &raw, double rawCost) {
    if (optimizerKind == OptimizerKind::None) {
      if (rawCost < result.store.bestCost) {
        result.store.bestCost = rawCost;
        result.store.bestPath = raw;
      }
      return rawCost;
    }
    Path optimised = raw;
    {
      ++result.optimizerCalls;
      const OptimizerBudget remaining{kInfinity, params.timeBudget};
      const std::size_t features = discretize(raw, delta).size();
      if (optimizerKind == OptimizerKind::Rs) {
        if (!calibrated) {
          calibrated = true;
          for (OptimizerKind k :
               {OptimizerKind::Prune, OptimizerKind::Wrap, OptimizerKind::Gb})
            result.model.record(features, timed(k, raw, remaining).second);
        }
        const OptimizerBudget limited{result.model.predict(features),
                                      params.timeBudget};
        optimised = timed(OptimizerKind::Rs, raw, limited).first;
      } else {
        auto [out, seconds] = timed(optimizerKind, raw, remaining);
        result.model.record(features, seconds);
        optimised = std::move(out);
      }
    }
    const double cost = std::min(pathLength(optimised), rawCost);
    if (cost < result.store.bestCost) {
      result.store.bestCost = cost;
      result.store.bestPath =
          pathLength(optimised) <= rawCost ? std::move(optimised) : raw;
    }
    return cost;
  };

  result.plan = runPlanner(plannerKind, problem, params, rng, clock, hooks);
  result.store.history = result.plan.record;
  return result;
}

} // namespace oirrt
