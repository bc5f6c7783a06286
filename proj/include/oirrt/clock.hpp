#pragma once

#include <chrono>
#include <cstddef>

namespace oirrt {

/// Units of work that planners and optimizers report to their clock.
enum class Work {
  SegmentCheck,
  PointCheck,
  NeighbourQuery,
  NeighbourVisit,
  Sample,
  Iteration,
};

/// Time source for anytime algorithms. Everything measures time through a
/// Clock so tests and reproducible benchmarks can swap wall time for a
/// virtual clock driven by the work performed.
class Clock {
public:
  virtual ~Clock() = default;

  /// Seconds since the start of the run.
  virtual double now() const = 0;

  virtual void charge(Work kind, std::size_t count = 1) = 0;
};

class WallClock final : public Clock {
public:
  WallClock() : start_(std::chrono::steady_clock::now()) {}

  double now() const override {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

  void charge(Work, std::size_t) override {}

private:
  std::chrono::steady_clock::time_point start_;
};

/// Deterministic clock: time advances only by charged work, each kind of
/// work having a fixed cost in virtual seconds. The defaults model a slow
/// embedded CPU, so a few virtual seconds of planning take a small fraction
/// of that in real time.
class VirtualClock final : public Clock {
public:
  struct Costs {
    double segmentCheck = 140e-6;
    double pointCheck = 35e-6;
    double neighbourQuery = 70e-6;
    double neighbourVisit = 7e-6;
    double sample = 14e-6;
    double iteration = 14e-6;
  };

  VirtualClock() = default;
  explicit VirtualClock(Costs costs) : costs_(costs) {}

  double now() const override { return elapsed_; }

  void charge(Work kind, std::size_t count = 1) override {
    elapsed_ += cost(kind) * static_cast<double>(count);
  }

  void advance(double seconds) { elapsed_ += seconds; }

  const Costs &costs() const { return costs_; }

private:
  double cost(Work kind) const {
    switch (kind) {
    case Work::SegmentCheck:
      return costs_.segmentCheck;
    case Work::PointCheck:
      return costs_.pointCheck;
    case Work::NeighbourQuery:
      return costs_.neighbourQuery;
    case Work::NeighbourVisit:
      return costs_.neighbourVisit;
    case Work::Sample:
      return costs_.sample;
    case Work::Iteration:
      return costs_.iteration;
    }
    return 0.0;
  }

  Costs costs_{};
  double elapsed_ = 0.0;
};

} // namespace oirrt
