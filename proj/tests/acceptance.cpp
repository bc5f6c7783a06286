// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <queue>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oirrt/oirrt.hpp"

using namespace oirrt;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string format(const char *fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. Neighbour queries against a linear scan.

std::vector<NodeId> scanOrder(const Tree &tree, Config q) {
  std::vector<std::pair<double, NodeId>> all;
  for (NodeId id = 0; id < tree.size(); ++id) {
    const double dx = tree.config(id).x - q.x, dy = tree.config(id).y - q.y;
    all.emplace_back(dx * dx + dy * dy, id);
  }
  std::sort(all.begin(), all.end());
  std::vector<NodeId> ids;
  for (const auto &a : all)
    ids.push_back(a.second);
  return ids;
}

Verdict neighbourOracle() {
  constexpr int kTrees = 10, kQueriesPerTree = 100, kNodes = 500;
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.0, 100.0), outside(-20.0, 120.0);
  const Box bounds{{0, 0}, {100, 100}};
  int mismatches = 0, queries = 0;
  for (int t = 0; t < kTrees; ++t) {
    Tree tree(bounds, 1.0 + t);
    tree.initialiseUnchecked({u(gen), u(gen)});
    while (tree.size() < kNodes)
      tree.insertNode(static_cast<NodeId>(gen() % tree.size()), {u(gen), u(gen)});
    for (int i = 0; i < kQueriesPerTree; ++i, ++queries) {
      const Config q = i % 10 == 0 ? Config{outside(gen), outside(gen)}
                                   : Config{u(gen), u(gen)};
      const auto ref = scanOrder(tree, q);
      const std::size_t k = 1 + gen() % 25;
      const double r = u(gen) / 4.0;
      std::vector<NodeId> refNear;
      for (NodeId id : ref)
        if (squaredDistance(tree.config(id), q) <= r * r)
          refNear.push_back(id);
      const bool ok =
          tree.nearestNeighbour(q) == ref.front() &&
          tree.kNearestNeighbours(q, k) ==
              std::vector<NodeId>(ref.begin(), ref.begin() + static_cast<long>(k)) &&
          tree.near(q, r) == refNear;
      mismatches += ok ? 0 : 1;
    }
  }
  return {mismatches == 0,
          format("%d queries on %d trees of %d nodes, %d mismatches", queries,
                 kTrees, kNodes, mismatches)};
}

// ---------------------------------------------------------------------------
// 2. Informed samples stay inside the ellipse.

Verdict informedSoundness() {
  const Config a{0, 0}, b{10, 0};
  const World plane(Box{{-100, -100}, {100, 100}}, {});
  const InformedRegion region(a, b, 12.0);
  RngStream rng(2);
  constexpr int kDraws = 100000;
  int outside = 0;
  for (int i = 0; i < kDraws; ++i) {
    const Config q = informedSample(region, plane, rng);
    const double sum = std::hypot(q.x - a.x, q.y - a.y) + std::hypot(q.x - b.x, q.y - b.y);
    outside += sum <= 12.0 + 1e-9 ? 0 : 1;
  }
  return {outside == 0, format("%d of %d draws outside the ellipse", outside, kDraws)};
}

// ---------------------------------------------------------------------------
// 3. RRT* tree costs and trace.

World fiveObstacles() {
  return World(Box{{0, 0}, {50, 50}},
               {Obstacle::circle({12, 12}, 5), Obstacle::circle({35, 15}, 6),
                Obstacle::polygon({{18, 24}, {30, 24}, {30, 30}, {18, 30}}),
                Obstacle::polygon({{36, 32}, {44, 36}, {38, 44}}),
                Obstacle::circle({10, 38}, 4)});
}

Verdict rrtStarConsistency() {
  const World w = fiveObstacles();
  PlannerParams params;
  params.timeBudget = 1e9;
  params.maxIterations = 10000;
  RngStream rng(3);
  VirtualClock clock;
  const auto r = runRRTStar({w, {2, 2}, {48, 48}}, params, rng, clock);
  double worst = 0.0;
  for (NodeId id = 0; id < r.tree.size(); ++id) {
    double walk = 0.0;
    for (NodeId n = id; r.tree.parent(n); n = *r.tree.parent(n))
      walk += distance(r.tree.config(*r.tree.parent(n)), r.tree.config(n));
    worst = std::max(worst, std::abs(walk - r.tree.cost(id)));
  }
  bool monotone = true;
  const auto &ev = r.record.events;
  for (std::size_t i = 1; i < ev.size(); ++i)
    monotone = monotone && ev[i].cost <= ev[i - 1].cost && ev[i].t > ev[i - 1].t;
  const bool pass = r.iterations == 10000 && worst <= 1e-9 && monotone &&
                    r.solution.has_value();
  return {pass, format("%zu iterations, %zu nodes, max cost drift %.2e, %zu trace "
                       "events %s",
                       r.iterations, r.tree.size(), worst, ev.size(),
                       monotone ? "non-increasing" : "NOT monotone")};
}

// ---------------------------------------------------------------------------
// 4. Optimizer contracts on recorded RRT paths.

std::vector<World> contractMaps() {
  std::vector<World> maps;
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> pos(6.0, 34.0), size(2.0, 5.0);
  const Box bounds{{0, 0}, {40, 40}};
  while (maps.size() < 5) {
    std::vector<Obstacle> obstacles;
    for (int i = 0; i < 6; ++i) {
      const Config c{pos(gen), pos(gen)};
      const double s = size(gen);
      if (i % 3 == 0)
        obstacles.push_back(Obstacle::circle(c, s));
      else if (i % 3 == 1)
        obstacles.push_back(Obstacle::polygon(
            {{c.x - s, c.y - s}, {c.x + s, c.y - s}, {c.x + s, c.y + s}, {c.x - s, c.y + s}}));
      else
        obstacles.push_back(Obstacle::polygon(
            {{c.x - s, c.y - s}, {c.x + s, c.y - 0.5 * s}, {c.x, c.y + s}}));
    }
    World w(bounds, std::move(obstacles));
    if (pointFree(w, {2, 2}) && pointFree(w, {38, 38}))
      maps.push_back(std::move(w));
  }
  return maps;
}

Verdict optimizerContracts() {
  const auto maps = contractMaps();
  int paths = 0, violations = 0, notIdempotent = 0;
  for (std::size_t m = 0; m < maps.size(); ++m) {
    int found = 0;
    for (std::uint64_t seed = 1; found < 20 && seed < 200; ++seed) {
      PlannerParams params;
      params.timeBudget = 5.0;
      RngStream rng(1000 * m + seed);
      VirtualClock clock;
      const auto r = runRRT({maps[m], {2, 2}, {38, 38}}, params, rng, clock);
      if (!r.solution)
        continue;
      ++found;
      ++paths;
      const Path &raw = r.solution->path;
      const double rawCost = pathLength(raw);
      for (auto kind : {OptimizerKind::Prune, OptimizerKind::Rs, OptimizerKind::Wrap,
                        OptimizerKind::Gb}) {
        RngStream orng(seed);
        VirtualClock oclock;
        const Path out = optimize(kind, maps[m], raw, OptimizerBudget{0.5}, orng, oclock);
        const bool ok = pathLength(out) <= rawCost + 1e-9 && pathFree(maps[m], out) &&
                        out.nodes.front() == raw.nodes.front() &&
                        out.nodes.back() == raw.nodes.back();
        violations += ok ? 0 : 1;
      }
      const Path once = prunePath(maps[m], raw);
      notIdempotent += prunePath(maps[m], once).nodes == once.nodes ? 0 : 1;
    }
  }
  return {paths == 100 && violations == 0 && notIdempotent == 0,
          format("%d paths on 5 maps x 4 optimizers: %d contract violations, "
                 "%d non-idempotent prunes",
                 paths, violations, notIdempotent)};
}

// ---------------------------------------------------------------------------
// 5. Gradient-based optimizer numerics.

Verdict gradientNumerics() {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-10.0, 10.0), v(-1.0, 1.0);
  auto randomPath = [&](std::size_t n) {
    Path p;
    for (std::size_t i = 0; i < n; ++i)
      p.nodes.push_back({u(gen), u(gen)});
    return p;
  };
  auto randomSpd = [&] {
    Eigen::Matrix2d a;
    a << v(gen), v(gen), v(gen), v(gen);
    return Eigen::Matrix2d(a * a.transpose() + 0.2 * Eigen::Matrix2d::Identity());
  };

  double worstGrad = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Path p = randomPath(3 + trial % 10);
    const gb::Objective f(p, trial % 2 ? randomSpd() : Eigen::Matrix2d::Identity());
    const Eigen::VectorXd x = f.pack(p);
    const Eigen::VectorXd g = f.gradient(x);
    Eigen::VectorXd fd(x.size());
    constexpr double h = 1e-5;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      Eigen::VectorXd a = x, b = x;
      a[i] += h;
      b[i] -= h;
      fd[i] = (f.value(a) - f.value(b)) / (2.0 * h);
    }
    worstGrad = std::max(worstGrad, (fd - g).norm() / std::max(g.norm(), 1.0));
  }

  // The minimiser solves H x = b, assembled here from the gradient: for a
  // quadratic, H e_i = g(x + e_i) - g(x) and b = H x - g(x).
  double worstStep = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Path p = randomPath(4 + trial % 8);
    const gb::Objective f(p, randomSpd());
    const Eigen::VectorXd x = f.pack(p);
    const Eigen::VectorXd g0 = f.gradient(x);
    Eigen::MatrixXd hess(x.size(), x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      Eigen::VectorXd e = x;
      e[i] += 1.0;
      hess.col(i) = f.gradient(e) - g0;
    }
    const Eigen::VectorXd ref = hess.fullPivLu().solve(hess * x - g0);
    const gb::ConstrainedNewton newton(f);
    worstStep = std::max(worstStep, (x + newton.step(x) - ref).lpNorm<Eigen::Infinity>());
  }

  const Path quarter{{{0, 0}, {0.875, std::sqrt(5.484375)}, {8, 0}}};
  const gb::Objective fq(quarter, Eigen::Matrix2d::Identity());
  const gb::ConstrainedNewton nq(fq);
  const Eigen::VectorXd xq = fq.pack(quarter);
  const Path pq = fq.unpack(xq + nq.step(xq));
  const double ratioErr = std::hypot(pq.nodes[1].x - 2.0, pq.nodes[1].y);

  return {worstGrad < 1e-6 && worstStep < 1e-9 && ratioErr < 1e-6,
          format("gradient rel err %.2e, Newton step err %.2e, 1:3 split err %.2e",
                 worstGrad, worstStep, ratioErr)};
}

// ---------------------------------------------------------------------------
// 6. Shortest paths against a visibility graph.

bool entersInterior(Config a, Config b, const std::vector<Config> &poly) {
  // Parameter range of the segment strictly inside every edge half-plane.
  double lo = 0.0, hi = 1.0;
  const Config d{b.x - a.x, b.y - a.y};
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Config p = poly[i], q = poly[(i + 1) % poly.size()];
    const Config e{q.x - p.x, q.y - p.y};
    // Inside a CCW polygon: cross(e, x - p) > 0.
    const double c0 = e.x * (a.y - p.y) - e.y * (a.x - p.x);
    const double c1 = e.x * d.y - e.y * d.x;
    const double tol = 1e-9 * std::hypot(e.x, e.y);
    if (std::abs(c1) < 1e-15) {
      if (c0 <= tol)
        return false;
      continue;
    }
    const double t = (tol - c0) / c1;
    if (c1 > 0)
      lo = std::max(lo, t);
    else
      hi = std::min(hi, t);
  }
  return hi - lo > 1e-9;
}

double visibilityShortest(const std::vector<std::vector<Config>> &polys,
                          const Box &bounds, Config start, Config goal) {
  std::vector<Config> nodes{start, goal};
  for (const auto &p : polys)
    for (Config v : p)
      if (bounds.contains(v))
        nodes.push_back(v);
  const std::size_t n = nodes.size();
  std::vector<double> dist(n, kInfinity);
  std::vector<bool> done(n, false);
  dist[0] = 0.0;
  for (std::size_t iter = 0; iter < n; ++iter) {
    std::size_t u = n;
    for (std::size_t i = 0; i < n; ++i)
      if (!done[i] && (u == n || dist[i] < dist[u]))
        u = i;
    if (u == n || std::isinf(dist[u]))
      break;
    done[u] = true;
    for (std::size_t w = 0; w < n; ++w) {
      if (done[w])
        continue;
      bool visible = true;
      for (const auto &p : polys)
        if (entersInterior(nodes[u], nodes[w], p)) {
          visible = false;
          break;
        }
      if (visible)
        dist[w] = std::min(dist[w], dist[u] + std::hypot(nodes[w].x - nodes[u].x,
                                                         nodes[w].y - nodes[u].y));
    }
  }
  return dist[1];
}

Verdict shortestPathOracle() {
  // Obstacles stay clear of each other and of the bounds, so the vertex
  // graph's shortest path is the infimum over collision-free paths.
  const Box bounds{{0, 0}, {40, 40}};
  const std::vector<std::vector<std::vector<Config>>> maps{
      {{{14, 12}, {26, 14}, {27, 26}, {13, 25}}},
      {{{8, 6}, {12, 6}, {12, 36}, {8, 36}}, {{24, 4}, {28, 4}, {28, 34}, {24, 34}}},
      {{{6, 10}, {14, 8}, {12, 16}},
       {{18, 4}, {26, 6}, {24, 14}, {19, 13}},
       {{14, 20}, {24, 20}, {24, 28}, {14, 28}},
       {{28, 26}, {34, 24}, {36, 32}, {31, 36}, {27, 31}}},
  };
  const Config start{2, 2}, goal{38, 38};
  constexpr int kRuns = 50;
  bool pass = true;
  std::string detail;
  for (std::size_t m = 0; m < maps.size(); ++m) {
    std::vector<Obstacle> obstacles;
    for (const auto &p : maps[m])
      obstacles.push_back(Obstacle::polygon(p));
    Scenario s{World(bounds, std::move(obstacles)), start, goal, 0.5, "visibility"};
    const double oracle = visibilityShortest(maps[m], bounds, start, goal);
    BenchConfig config;
    config.planner = PlannerKind::IbRrt;
    config.optimizer = OptimizerKind::Rs;
    config.params.timeBudget = 5.0;
    config.runs = kRuns;
    config.masterSeed = 60 + m;
    config.threads = 1;
    config = configureFor(s, config);
    int within = 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < kRuns; ++i) {
      const auto r = runSingle(s, config, i);
      const double ratio = r.store.bestCost / oracle;
      worst = std::max(worst, ratio);
      within += ratio <= 1.02 ? 1 : 0;
      if (r.store.found() && r.store.bestCost < oracle - 1e-6)
        pass = false; // a path shorter than the oracle means a bug somewhere
    }
    pass = pass && within >= 45;
    detail += format("%smap %zu: oracle %.3f, %d/%d within 2%% (worst %.4f)",
                     m ? "; " : "", m + 1, oracle, within, kRuns, worst);
  }
  return {pass, detail};
}

// ---------------------------------------------------------------------------
// 7. Ordering of planners on the cluttered map.

struct Outcome {
  ConvergenceTable table;
  double t100 = kInfinity; ///< time by which every run has a solution
  double finalMedian = kInfinity;
};

double medianAt(const ConvergenceTable &table, double t) {
  std::vector<double> costs;
  for (const auto &r : table.runs)
    costs.push_back(costAt(r, t));
  std::sort(costs.begin(), costs.end());
  return percentileOfSorted(costs, 50);
}

Outcome runOutcome(const Scenario &s, PlannerKind planner, OptimizerKind optimizer,
                   std::uint64_t seed) {
  BenchConfig config;
  config.planner = planner;
  config.optimizer = optimizer;
  config.params.timeBudget = 5.0;
  config.runs = 50;
  config.masterSeed = seed;
  config.threads = 1;
  config = configureFor(s, config);
  Outcome o;
  o.table = runBenchmark(s, config);
  o.t100 = 0.0;
  for (const auto &r : o.table.runs)
    o.t100 = std::max(o.t100, r.events.empty() ? kInfinity : r.events.front().t);
  o.finalMedian = medianAt(o.table, config.params.timeBudget);
  return o;
}

Verdict qualitativeOrdering(std::string &table) {
  const Scenario s = loadScenarioFile(OIRRT_SCENARIO_DIR "/cluttered100.json");
  const std::vector<OptimizerKind> opts{OptimizerKind::Prune, OptimizerKind::Rs,
                                        OptimizerKind::Wrap, OptimizerKind::Gb};
  int holdA = 0, holdB = 0, holdC = 0, holdD = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Outcome ib = runOutcome(s, PlannerKind::IbRrt, OptimizerKind::None, seed);
    const Outcome irs = runOutcome(s, PlannerKind::IRrtStar, OptimizerKind::None, seed);
    const bool a = ib.t100 < irs.t100;
    const bool b = ib.finalMedian > irs.finalMedian;
    bool c = true;
    std::string cText;
    Outcome oibRs;
    for (auto k : opts) {
      Outcome oib = runOutcome(s, PlannerKind::IbRrt, k, seed);
      // Both medians are read where both configurations have solved every run.
      const double t = std::max(oib.t100, ib.t100);
      const double mo = medianAt(oib.table, t), mb = medianAt(ib.table, t);
      c = c && mo < mb;
      cText += format(" %s@%.3f=%.2f/%.2f", std::string(toString(k)).c_str(), t, mo, mb);
      if (k == OptimizerKind::Rs)
        oibRs = std::move(oib);
    }
    bool d = true;
    std::string dText;
    for (auto k : opts) {
      const Outcome oirs = runOutcome(s, PlannerKind::IRrtStar, k, seed);
      d = d && oibRs.finalMedian <= oirs.finalMedian;
      dText += format(" %s=%.3f", std::string(toString(k)).c_str(), oirs.finalMedian);
    }
    holdA += a;
    holdB += b;
    holdC += c;
    holdD += d;
    table += format("  seed %llu: T100 ib=%.3f i-rrt*=%.3f [%s]; final median "
                    "ib=%.3f i-rrt*=%.3f [%s]\n",
                    static_cast<unsigned long long>(seed), ib.t100, irs.t100,
                    a ? "a ok" : "a FAIL", ib.finalMedian, irs.finalMedian,
                    b ? "b ok" : "b FAIL");
    table += "    (c) oib/ib median:" + cText + (c ? " [ok]\n" : " [FAIL]\n");
    table += format("    (d) oib-rs=%.3f vs oi-rrt*:", oibRs.finalMedian) + dText +
             (d ? " [ok]\n" : " [FAIL]\n");
  }
  const bool pass = holdA >= 4 && holdB >= 4 && holdC >= 4 && holdD >= 4;
  return {pass, format("seeds holding (a) %d/5, (b) %d/5, (c) %d/5, (d) %d/5",
                       holdA, holdB, holdC, holdD)};
}

// ---------------------------------------------------------------------------
// 8. Determinism of virtual-clock benchmarks.

#ifdef OIRRT_CLI
std::string slurp(const std::string &path) {
  try {
    return readFile(path);
  } catch (const Error &) {
    return {};
  }
}
#endif

Verdict determinism() {
  const Scenario s = loadScenarioFile(OIRRT_SCENARIO_DIR "/cluttered100.json");
  BenchConfig config;
  config.planner = PlannerKind::IbRrt;
  config.optimizer = OptimizerKind::Rs;
  config.params.timeBudget = 2.0;
  config.runs = 8;
  config.masterSeed = 8;
  config = configureFor(s, config);
  BenchConfig threaded = config;
  threaded.threads = 4;
  const std::string a = writeCsv(runBenchmark(s, config));
  const std::string b = writeCsv(runBenchmark(s, config));
  const std::string c = writeCsv(runBenchmark(s, threaded));
  const bool library = a == b && a == c && a.size() > 100;

  std::string cliDetail = "CLI not checked";
  bool cli = true;
#ifdef OIRRT_CLI
  const std::string out1 = OIRRT_BINARY_DIR "/acceptance_bench_1.csv";
  const std::string out2 = OIRRT_BINARY_DIR "/acceptance_bench_2.csv";
  auto invoke = [&](const std::string &out) {
    const std::string cmd = std::string("\"") + OIRRT_CLI + "\" bench --scenario \"" +
                            OIRRT_SCENARIO_DIR + "/cluttered100.json\" --planner ib-rrt "
                            "--optimizer rs --time-budget 5 --runs 4 --seed 99 "
                            "--virtual-clock --csv-out \"" + out + "\" > /dev/null";
    return std::system(cmd.c_str()) == 0;
  };
  const bool ran = invoke(out1) && invoke(out2);
  const std::string f1 = slurp(out1), f2 = slurp(out2);
  cli = ran && !f1.empty() && f1 == f2;
  cliDetail = format("CLI csv %zu bytes %s", f1.size(), cli ? "identical" : "DIFFERS");
#endif
  return {library && cli,
          format("library csv %zu bytes %s across repeats and worker counts; %s",
                 a.size(), library ? "identical" : "DIFFERS", cliDetail.c_str())};
}

} // namespace

int main() {
  struct Criterion {
    int id;
    const char *name;
    double limitSeconds;
    std::function<Verdict()> run;
  };
  std::string orderingTable;
  const std::vector<Criterion> criteria{
      {1, "neighbour queries match a linear scan", 10.0, neighbourOracle},
      {2, "informed samples lie in the ellipse", 5.0, informedSoundness},
      {3, "RRT* costs and trace stay consistent", 30.0, rrtStarConsistency},
      {4, "optimizer contracts on recorded RRT paths", 60.0, optimizerContracts},
      {5, "gradient-based optimizer numerics", 60.0, gradientNumerics},
      {6, "ib-rrt + rs against visibility-graph shortest paths", 300.0,
       shortestPathOracle},
      {7, "planner ordering on the cluttered 100 m map", 3600.0,
       [&] { return qualitativeOrdering(orderingTable); }},
      {8, "virtual-clock benchmarks are byte-identical", 120.0, determinism},
  };
  int failures = 0;
  for (const auto &c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception &e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool inTime = secs < c.limitSeconds;
    const bool pass = v.pass && inTime;
    failures += pass ? 0 : 1;
    std::printf("%s criterion %d (%s): %s [%.1f s, limit %.0f s%s]\n",
                pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str(), secs,
                c.limitSeconds, inTime ? "" : ", EXCEEDED");
    if (c.id == 7)
      std::fputs(orderingTable.c_str(), stdout);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n",
              static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
