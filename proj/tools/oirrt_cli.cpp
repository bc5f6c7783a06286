// Command-line driver: plan, optimize and bench subcommands.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "oirrt/oirrt.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNoSolution = 1;
constexpr int kExitInputError = 2;

struct Options {
  std::string scenario;
  std::string planner = "ib-rrt";
  std::string optimizer = "none";
  double timeBudget = 5.0;
  std::size_t runs = 50;
  std::uint64_t seed = 1;
  std::size_t k = 10;
  double step = 2.0;
  double goalBias = 0.05;
  double maxTimePerTree = 0.0;
  std::string csvOut;
  std::string svgOut;
  std::string pathIn;
  std::string pathOut;
  std::string percentilesOut;
  std::size_t gridPoints = 50;
  unsigned threads = 0;
  bool virtualClock = false;
};

void addShared(CLI::App *cmd, Options &o) {
  cmd->add_option("--scenario", o.scenario, "scenario JSON file")->required();
  cmd->add_option("--planner", o.planner, "rrt|rrt-star|ib-rrt|ikn-rrt|i-rrt-star");
  cmd->add_option("--optimizer", o.optimizer, "none|prune|rs|wrap|gb");
  cmd->add_option("--time-budget", o.timeBudget, "seconds per run");
  cmd->add_option("--runs", o.runs, "independent runs");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--k", o.k, "neighbours for ikn-rrt");
  cmd->add_option("--step", o.step, "extension length in meters");
  cmd->add_option("--goal-bias", o.goalBias, "goal sampling probability");
  cmd->add_option("--max-time-per-tree", o.maxTimePerTree,
                  "informed RRT tree lifetime in seconds (0 = budget/15)");
  cmd->add_option("--csv-out", o.csvOut, "convergence CSV output");
  cmd->add_option("--svg-out", o.svgOut, "SVG output");
  cmd->add_flag("--virtual-clock", o.virtualClock,
                "deterministic work-based clock instead of wall time");
}

oirrt::BenchConfig makeConfig(const oirrt::Scenario &scenario,
                              const Options &o) {
  oirrt::BenchConfig config;
  config.planner = oirrt::parsePlannerKind(o.planner);
  config.optimizer = oirrt::parseOptimizerKind(o.optimizer);
  config.params.timeBudget = o.timeBudget;
  config.params.k = o.k;
  config.params.step = o.step;
  config.params.goalBias = o.goalBias;
  config.params.maxTimePerTree = o.maxTimePerTree;
  config.runs = o.runs;
  config.masterSeed = o.seed;
  config.virtualClock = o.virtualClock;
  config.gridPoints = o.gridPoints;
  config.threads = o.threads;
  config = oirrt::configureFor(scenario, config);
  config.params.validate();
  return config;
}

std::string number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return std::isinf(v) ? "inf" : buf;
}

int runPlan(const Options &o) {
  const auto scenario = oirrt::loadScenarioFile(o.scenario);
  const auto config = makeConfig(scenario, o);
  const auto result = oirrt::runSingle(scenario, config, 0);
  const auto &history = result.store.history;
  std::cout << "planner=" << o.planner << " optimizer=" << o.optimizer
            << " c_best=" << number(result.store.bestCost)
            << " first_solution_t="
            << (history.events.empty() ? std::string("inf")
                                       : number(history.events.front().t))
            << " trees=" << result.plan.treesGrown
            << " iterations=" << result.plan.iterations << "\n";
  if (!o.svgOut.empty())
    oirrt::renderSvg(scenario, &result.plan.tree,
                     result.store.found() ? &result.store.bestPath : nullptr,
                     o.svgOut);
  if (!o.csvOut.empty()) {
    oirrt::ConvergenceTable table{{history},
                                  oirrt::uniformGrid(o.timeBudget, o.gridPoints)};
    oirrt::writeFile(o.csvOut, oirrt::writeCsv(table));
  }
  if (!o.pathOut.empty() && result.store.found())
    oirrt::writeFile(o.pathOut, oirrt::writePath(result.store.bestPath));
  return result.store.found() ? kExitOk : kExitNoSolution;
}

int runOptimize(const Options &o) {
  const auto scenario = oirrt::loadScenarioFile(o.scenario);
  const auto path = oirrt::loadPath(oirrt::readFile(o.pathIn));
  if (!(path.nodes.front() == scenario.start) ||
      !(path.nodes.back() == scenario.goal))
    std::cerr << "warning: path endpoints differ from the scenario query\n";
  if (!oirrt::pathFree(scenario.world, path))
    throw oirrt::ValidationError("input path is not collision-free");
  const auto kind = oirrt::parseOptimizerKind(o.optimizer);
  oirrt::OptimizerSettings settings;
  settings.shortcut.delta = o.step / 2.0;
  oirrt::RngStream rng(o.seed);
  oirrt::OptimizerBudget budget{o.timeBudget};
  oirrt::Path out;
  double elapsed = 0.0;
  if (o.virtualClock) {
    oirrt::VirtualClock clock;
    out = oirrt::optimize(kind, scenario.world, path, budget, rng, clock,
                          settings);
    elapsed = clock.now();
  } else {
    oirrt::WallClock clock;
    out = oirrt::optimize(kind, scenario.world, path, budget, rng, clock,
                          settings);
    elapsed = clock.now();
  }
  std::cout << "optimizer=" << o.optimizer
            << " input_cost=" << number(oirrt::pathLength(path))
            << " output_cost=" << number(oirrt::pathLength(out))
            << " nodes=" << out.size() << " elapsed=" << number(elapsed)
            << "\n";
  if (!o.pathOut.empty())
    oirrt::writeFile(o.pathOut, oirrt::writePath(out));
  else
    std::cout << oirrt::writePath(out);
  if (!o.svgOut.empty())
    oirrt::renderSvg(scenario, nullptr, &out, o.svgOut);
  return kExitOk;
}

int runBench(const Options &o) {
  const auto scenario = oirrt::loadScenarioFile(o.scenario);
  const auto config = makeConfig(scenario, o);
  const auto table = oirrt::runBenchmark(scenario, config);
  const auto curves = oirrt::percentileCurves(table, {25, 50, 75, 100},
                                              table.sampleTimes);
  if (!o.csvOut.empty())
    oirrt::writeFile(o.csvOut, oirrt::writeCsv(table));
  if (!o.percentilesOut.empty())
    oirrt::writeFile(o.percentilesOut, oirrt::writePercentileCsv(curves));
  const std::size_t last = table.sampleTimes.size() - 1;
  std::cout << "planner=" << o.planner << " optimizer=" << o.optimizer
            << " runs=" << o.runs
            << " success=" << number(curves.successRate[last])
            << " median_c_best=" << number(curves.values[1][last])
            << " min_c_best=" << number(curves.min[last])
            << " max_c_best=" << number(curves.max[last]) << "\n";
  return curves.successRate[last] > 0.0 ? kExitOk : kExitNoSolution;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Informed and optimised-informed RRT planners"};
  app.require_subcommand(1);
  Options o;

  auto *plan = app.add_subcommand("plan", "single run; SVG and summary");
  addShared(plan, o);
  plan->add_option("--path-out", o.pathOut, "best path JSON");

  auto *opt = app.add_subcommand("optimize", "optimize a path file");
  addShared(opt, o);
  opt->add_option("--path", o.pathIn, "input path JSON")->required();
  opt->add_option("--out", o.pathOut, "output path JSON");

  auto *bench = app.add_subcommand("bench", "repeated runs to convergence CSV");
  addShared(bench, o);
  bench->add_option("--percentiles-out", o.percentilesOut,
                    "percentile curves CSV");
  bench->add_option("--grid-points", o.gridPoints, "CSV time grid size");
  bench->add_option("--threads", o.threads, "worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (*plan)
      return runPlan(o);
    if (*opt)
      return runOptimize(o);
    return runBench(o);
  } catch (const oirrt::Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}
