#pragma once

#include <limits>
#include <vector>

namespace oirrt {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Best-cost trace of one run. Times strictly increase and costs strictly
/// decrease; before the first event the cost is infinite.
struct ConvergenceRecord {
  struct Event {
    double t = 0.0;
    double cost = kInfinity;
    bool operator==(const Event &) const = default;
  };

  std::vector<Event> events;
  double budget = 0.0;

  /// Records a new best cost. Non-improving costs are ignored; an event at a
  /// time not after the last one replaces the last cost.
  void improve(double t, double cost) {
    if (!events.empty()) {
      if (!(cost < events.back().cost))
        return;
      if (t <= events.back().t) {
        events.back().cost = cost;
        return;
      }
    }
    events.push_back({t, cost});
  }

  double best() const { return events.empty() ? kInfinity : events.back().cost; }

  bool operator==(const ConvergenceRecord &) const = default;
};

/// Cost of the last event at or before t, infinite if there is none.
inline double costAt(const ConvergenceRecord &record, double t) {
  double cost = kInfinity;
  for (const auto &e : record.events) {
    if (e.t > t)
      break;
    cost = e.cost;
  }
  return cost;
}

} // namespace oirrt
