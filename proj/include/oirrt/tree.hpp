#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "oirrt/error.hpp"
#include "oirrt/geometry.hpp"

namespace oirrt {

using NodeId = std::uint32_t;

inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

/// Rooted planning tree with cost-from-root bookkeeping and a uniform grid
/// index for neighbour queries. All neighbour queries order their results by
/// (distance, insertion id).
class Tree {
public:
  struct Node {
    Config config;
    NodeId parent = kNoNode;
    double cost = 0.0;
  };

  /// `bounds` sizes the grid; nodes outside it are still handled correctly.
  explicit Tree(const Box &bounds, double cellSize = 0.0) : bounds_(bounds) {
    if (!(cellSize > 0.0))
      cellSize = bounds.diameter() / 64.0;
    constexpr std::int64_t kMaxCells = 512;
    cols_ = std::clamp<std::int64_t>(
        static_cast<std::int64_t>(std::ceil(bounds.width() / cellSize)), 1,
        kMaxCells);
    rows_ = std::clamp<std::int64_t>(
        static_cast<std::int64_t>(std::ceil(bounds.height() / cellSize)), 1,
        kMaxCells);
    cell_ = std::max(bounds.width() / static_cast<double>(cols_),
                     bounds.height() / static_cast<double>(rows_));
    cols_ = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::ceil(bounds.width() / cell_)));
    rows_ = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::ceil(bounds.height() / cell_)));
    cells_.resize(static_cast<std::size_t>(cols_ * rows_));
  }

  /// Discards all nodes and roots the tree at qI.
  void initialise(const World &world, Config qI) {
    if (!qI.finite() || !pointFree(world, qI))
      throw InvalidStart("start configuration is not collision-free");
    clear();
    addNode(qI, kNoNode, 0.0);
  }

  void reInitialise(const World &world, Config qI) { initialise(world, qI); }

  /// Roots the tree at q without a collision check (for index tests).
  void initialiseUnchecked(Config q) {
    clear();
    addNode(q, kNoNode, 0.0);
  }

  NodeId insertNode(NodeId parent, Config q) {
    const Node &p = nodes_.at(parent);
    return addNode(q, parent, p.cost + distance(p.config, q));
  }

  /// Replaces node's parent and refreshes the cost of its whole subtree.
  void reparent(NodeId node, NodeId newParent) {
    if (node >= nodes_.size() || newParent >= nodes_.size())
      throw Error("reparent: unknown node id");
    for (NodeId walk = newParent; walk != kNoNode; walk = nodes_[walk].parent)
      if (walk == node)
        throw CycleError("reparent would create a cycle");
    auto &siblings = children_[nodes_[node].parent];
    siblings.erase(std::find(siblings.begin(), siblings.end(), node));
    children_[newParent].push_back(node);
    nodes_[node].parent = newParent;

    std::vector<NodeId> stack{node};
    while (!stack.empty()) {
      const NodeId id = stack.back();
      stack.pop_back();
      const Node &p = nodes_[nodes_[id].parent];
      nodes_[id].cost = p.cost + distance(p.config, nodes_[id].config);
      stack.insert(stack.end(), children_[id].begin(), children_[id].end());
    }
  }

  NodeId nearestNeighbour(Config q) const {
    NodeId best = kNoNode;
    double bestD2 = std::numeric_limits<double>::infinity();
    auto visit = [&](NodeId id) {
      const double d2 = squaredDistance(nodes_[id].config, q);
      if (d2 < bestD2 || (d2 == bestD2 && id < best)) {
        bestD2 = d2;
        best = id;
      }
    };
    for (NodeId id : outliers_)
      visit(id);
    searchRings(q, [&](std::int64_t ring) {
      forRing(q, ring, visit);
      const double reach = coveredRadius(q, ring);
      return best != kNoNode && reach > 0.0 && bestD2 < reach * reach;
    });
    return best;
  }

  std::vector<NodeId> kNearestNeighbours(Config q, std::size_t k) const {
    std::vector<std::pair<double, NodeId>> found;
    if (k == 0)
      return {};
    auto visit = [&](NodeId id) {
      found.emplace_back(squaredDistance(nodes_[id].config, q), id);
    };
    for (NodeId id : outliers_)
      visit(id);
    searchRings(q, [&](std::int64_t ring) {
      forRing(q, ring, visit);
      if (found.size() < k)
        return false;
      std::nth_element(found.begin(), found.begin() + (k - 1), found.end());
      const double reach = coveredRadius(q, ring);
      return reach > 0.0 && found[k - 1].first < reach * reach;
    });
    std::sort(found.begin(), found.end());
    if (found.size() > k)
      found.resize(k);
    std::vector<NodeId> ids;
    ids.reserve(found.size());
    for (const auto &f : found)
      ids.push_back(f.second);
    return ids;
  }

  std::vector<NodeId> near(Config q, double radius) const {
    std::vector<std::pair<double, NodeId>> found;
    const double r2 = radius * radius;
    auto visit = [&](NodeId id) {
      const double d2 = squaredDistance(nodes_[id].config, q);
      if (d2 <= r2)
        found.emplace_back(d2, id);
    };
    for (NodeId id : outliers_)
      visit(id);
    const auto [c0, r0] = cellOf({q.x - radius, q.y - radius});
    const auto [c1, r1] = cellOf({q.x + radius, q.y + radius});
    for (std::int64_t r = std::max<std::int64_t>(r0, 0);
         r <= std::min(r1, rows_ - 1); ++r)
      for (std::int64_t c = std::max<std::int64_t>(c0, 0);
           c <= std::min(c1, cols_ - 1); ++c)
        for (NodeId id : cells_[static_cast<std::size_t>(r * cols_ + c)])
          visit(id);
    std::sort(found.begin(), found.end());
    std::vector<NodeId> ids;
    ids.reserve(found.size());
    for (const auto &f : found)
      ids.push_back(f.second);
    return ids;
  }

  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }
  NodeId root() const { return 0; }
  const Node &node(NodeId id) const { return nodes_.at(id); }
  const std::vector<Node> &nodes() const { return nodes_; }
  Config config(NodeId id) const { return nodes_.at(id).config; }
  double cost(NodeId id) const { return nodes_.at(id).cost; }
  std::optional<NodeId> parent(NodeId id) const {
    const NodeId p = nodes_.at(id).parent;
    return p == kNoNode ? std::nullopt : std::optional<NodeId>(p);
  }
  const std::vector<NodeId> &children(NodeId id) const {
    return children_.at(id);
  }
  const Box &bounds() const { return bounds_; }

  /// Configurations from the root down to `id`.
  std::vector<Config> branch(NodeId id) const {
    std::vector<Config> out;
    for (NodeId walk = id; walk != kNoNode; walk = nodes_.at(walk).parent)
      out.push_back(nodes_[walk].config);
    std::reverse(out.begin(), out.end());
    return out;
  }

private:
  void clear() {
    nodes_.clear();
    children_.clear();
    outliers_.clear();
    for (auto &cell : cells_)
      cell.clear();
  }

  NodeId addNode(Config q, NodeId parent, double cost) {
    const auto id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back({q, parent, cost});
    children_.emplace_back();
    if (parent != kNoNode)
      children_[parent].push_back(id);
    const auto [c, r] = cellOf(q);
    if (c < 0 || c >= cols_ || r < 0 || r >= rows_)
      outliers_.push_back(id);
    else
      cells_[static_cast<std::size_t>(r * cols_ + c)].push_back(id);
    return id;
  }

  std::pair<std::int64_t, std::int64_t> cellOf(Config q) const {
    return {static_cast<std::int64_t>(std::floor((q.x - bounds_.min.x) / cell_)),
            static_cast<std::int64_t>(
                std::floor((q.y - bounds_.min.y) / cell_))};
  }

  // Distance from q to the outside of the block of cells scanned after
  // `ring` rings; every unvisited grid node is at least this far away.
  double coveredRadius(Config q, std::int64_t ring) const {
    const auto [qc, qr] = cellOf(q);
    const double x0 = bounds_.min.x + static_cast<double>(qc - ring) * cell_;
    const double y0 = bounds_.min.y + static_cast<double>(qr - ring) * cell_;
    const double span = static_cast<double>(2 * ring + 1) * cell_;
    return std::min({q.x - x0, x0 + span - q.x, q.y - y0, y0 + span - q.y});
  }

  // Calls done(ring) after each ring until it returns true or the grid is
  // exhausted.
  template <class Done>
  void searchRings(Config q, Done &&done) const {
    const auto [qc, qr] = cellOf(q);
    const std::int64_t last =
        std::max({std::abs(qc), std::abs(qc - (cols_ - 1)), std::abs(qr),
                  std::abs(qr - (rows_ - 1))});
    for (std::int64_t ring = 0; ring <= last; ++ring)
      if (done(ring))
        return;
  }

  template <class Visit>
  void forRing(Config q, std::int64_t ring, Visit &&visit) const {
    const auto [qc, qr] = cellOf(q);
    auto scanCell = [&](std::int64_t c, std::int64_t r) {
      if (c < 0 || c >= cols_ || r < 0 || r >= rows_)
        return;
      for (NodeId id : cells_[static_cast<std::size_t>(r * cols_ + c)])
        visit(id);
    };
    if (ring == 0) {
      scanCell(qc, qr);
      return;
    }
    for (std::int64_t c = qc - ring; c <= qc + ring; ++c) {
      scanCell(c, qr - ring);
      scanCell(c, qr + ring);
    }
    for (std::int64_t r = qr - ring + 1; r <= qr + ring - 1; ++r) {
      scanCell(qc - ring, r);
      scanCell(qc + ring, r);
    }
  }

  Box bounds_;
  double cell_ = 1.0;
  std::int64_t cols_ = 1;
  std::int64_t rows_ = 1;
  std::vector<Node> nodes_;
  std::vector<std::vector<NodeId>> children_;
  std::vector<std::vector<NodeId>> cells_;
  std::vector<NodeId> outliers_;
};

} // namespace oirrt
