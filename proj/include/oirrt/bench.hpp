#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

#include "oirrt/clock.hpp"
#include "oirrt/composition.hpp"
#include "oirrt/convergence.hpp"
#include "oirrt/error.hpp"
#include "oirrt/scenario.hpp"

namespace oirrt {

/// Convergence traces of repeated independent runs of one configuration.
struct ConvergenceTable {
  std::vector<ConvergenceRecord> runs;
  std::vector<double> sampleTimes;

  bool operator==(const ConvergenceTable &) const = default;
};

struct BenchConfig {
  PlannerKind planner = PlannerKind::IbRrt;
  OptimizerKind optimizer = OptimizerKind::None;
  PlannerParams params;
  CompositionSettings composition;
  std::size_t runs = 50;
  std::uint64_t masterSeed = 1;
  bool virtualClock = true;
  VirtualClock::Costs costs{};
  unsigned threads = 0;         ///< 0 picks hardware concurrency
  std::size_t gridPoints = 50;  ///< sample times spread over the budget
};

/// Evenly spaced grid (budget/points, ..., budget).
inline std::vector<double> uniformGrid(double budget, std::size_t points) {
  std::vector<double> grid;
  grid.reserve(points);
  for (std::size_t i = 1; i <= points; ++i)
    grid.push_back(budget * static_cast<double>(i) /
                   static_cast<double>(points));
  return grid;
}

/// Planner parameters for a scenario: its goal radius, and an RS resolution
/// of half the planner step.
inline BenchConfig configureFor(const Scenario &scenario, BenchConfig config) {
  config.params.goalRadius = scenario.goalRadius;
  config.composition.optimizer.shortcut.delta = config.params.step / 2.0;
  return config;
}

/// One run with the stream derived from (masterSeed, index).
inline OptimisedResult runSingle(const Scenario &scenario,
                                 const BenchConfig &config,
                                 std::size_t index) {
  RngStream rng = RngStream::forRun(config.masterSeed, index);
  const Problem problem{scenario.world, scenario.start, scenario.goal};
  auto run = [&](Clock &clock) {
    return runOptimisedInformed(config.planner, config.optimizer, problem,
                                config.params, rng, clock,
                                config.composition);
  };
  if (config.virtualClock) {
    VirtualClock clock(config.costs);
    return run(clock);
  }
  WallClock clock;
  return run(clock);
}

/// Runs `config.runs` independent runs on a worker pool. Results are
/// ordered by run index, so with the virtual clock the table depends only
/// on (masterSeed, params, scenario).
inline ConvergenceTable runBenchmark(const Scenario &scenario,
                                     const BenchConfig &config) {
  if (config.runs < 1)
    throw ValidationError("runs must be at least 1");
  config.params.validate();
  ConvergenceTable table;
  table.runs.resize(config.runs);
  table.sampleTimes = uniformGrid(config.params.timeBudget, config.gridPoints);

  unsigned threads = config.threads ? config.threads
                                    : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(
      std::min<std::size_t>(threads, config.runs));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failureMutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < config.runs; i = next++) {
      try {
        ConvergenceRecord record = runSingle(scenario, config, i).store.history;
        record.budget = config.params.timeBudget;
        table.runs[i] = std::move(record);
      } catch (...) {
        std::lock_guard lock(failureMutex);
        if (!failure)
          failure = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back(worker);
    for (auto &t : pool)
      t.join();
  }
  if (failure)
    std::rethrow_exception(failure);
  return table;
}

/// Percentile statistics over runs at each grid time. Infinite costs (no
/// path yet) sort after every finite cost; a percentile is infinite when
/// its interpolation touches an infinite cost.
struct PercentileCurves {
  std::vector<double> grid;
  std::vector<double> percentiles;
  std::vector<std::vector<double>> values; ///< [percentile][grid index]
  std::vector<double> min;
  std::vector<double> max;
  std::vector<double> successRate;
};

/// Linear-interpolation percentile of sorted values (p in [0, 100]).
inline double percentileOfSorted(const std::vector<double> &sorted, double p) {
  if (sorted.empty())
    return kInfinity;
  const double pos = p / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  const double frac = pos - static_cast<double>(lo);
  if (lo == hi || frac == 0.0)
    return sorted[lo];
  if (std::isinf(sorted[hi]) || std::isinf(sorted[lo]))
    return kInfinity;
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline PercentileCurves percentileCurves(const ConvergenceTable &table,
                                         const std::vector<double> &percentiles,
                                         const std::vector<double> &grid) {
  for (double p : percentiles)
    if (!(p >= 0.0 && p <= 100.0))
      throw ValidationError("percentiles must lie in [0, 100]");
  PercentileCurves curves;
  curves.grid = grid;
  curves.percentiles = percentiles;
  curves.values.assign(percentiles.size(), std::vector<double>(grid.size()));
  curves.min.resize(grid.size());
  curves.max.resize(grid.size());
  curves.successRate.resize(grid.size());
  std::vector<double> costs(table.runs.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    for (std::size_t r = 0; r < table.runs.size(); ++r)
      costs[r] = costAt(table.runs[r], grid[g]);
    std::sort(costs.begin(), costs.end());
    const auto finite = static_cast<std::size_t>(
        std::count_if(costs.begin(), costs.end(),
                      [](double c) { return std::isfinite(c); }));
    curves.successRate[g] =
        costs.empty() ? 0.0
                      : static_cast<double>(finite) /
                            static_cast<double>(costs.size());
    curves.min[g] = costs.empty() ? kInfinity : costs.front();
    curves.max[g] = costs.empty() ? kInfinity : costs.back();
    for (std::size_t p = 0; p < percentiles.size(); ++p)
      curves.values[p][g] = percentileOfSorted(costs, percentiles[p]);
  }
  return curves;
}

} // namespace oirrt
