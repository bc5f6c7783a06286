#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "oirrt/clock.hpp"
#include "oirrt/geometry.hpp"

namespace oirrt::gb {

struct Params {
  Eigen::Matrix2d weight = Eigen::Matrix2d::Identity(); ///< W, SPD
  double alphaSmall = 0.1;
  std::size_t maxOuterIterations = 100;
  double convergenceTol = 1e-4;
};

/// Weighted squared path length over all segments with fixed endpoints,
///   L(Q) = 1/2 sum_k lambda_k |q_k - q_{k+1}|_W^2,
/// as a function of the stacked interior nodes x = (q_1, ..., q_{n-2}).
/// The per-segment lambda_k are inversely proportional to the segment
/// lengths of the path the objective is built from, so the stationary point
/// keeps its segment-length ratios.
class Objective {
public:
  Objective(const Path &initial, const Eigen::Matrix2d &weight)
      : weight_(weight), first_(initial.nodes.front()),
        last_(initial.nodes.back()), lambda_(segmentWeights(initial)),
        interior_(initial.nodes.size() - 2) {}

  Objective(const Path &initial, const Eigen::Matrix2d &weight,
            std::vector<double> lambda)
      : weight_(weight), first_(initial.nodes.front()),
        last_(initial.nodes.back()), lambda_(std::move(lambda)),
        interior_(initial.nodes.size() - 2) {}

  /// lambda_k = total / ((n - 1) * length_k), so sum_k 1/lambda_k = n - 1
  /// as with unit weights.
  static std::vector<double> segmentWeights(const Path &path) {
    const std::size_t segments = path.nodes.size() - 1;
    const double total = std::max(pathLength(path), 1e-12);
    std::vector<double> lambda(segments);
    for (std::size_t k = 0; k < segments; ++k) {
      const double len =
          std::max(distance(path.nodes[k], path.nodes[k + 1]), 1e-12);
      lambda[k] = total / (static_cast<double>(segments) * len);
    }
    return lambda;
  }

  std::size_t dimension() const { return 2 * interior_; }
  const std::vector<double> &lambda() const { return lambda_; }
  const Eigen::Matrix2d &weight() const { return weight_; }

  Eigen::VectorXd pack(const Path &path) const {
    Eigen::VectorXd x(dimension());
    for (std::size_t i = 0; i < interior_; ++i) {
      x[2 * i] = path.nodes[i + 1].x;
      x[2 * i + 1] = path.nodes[i + 1].y;
    }
    return x;
  }

  Path unpack(const Eigen::VectorXd &x) const {
    Path path;
    path.nodes.reserve(interior_ + 2);
    path.nodes.push_back(first_);
    for (std::size_t i = 0; i < interior_; ++i)
      path.nodes.push_back({x[2 * i], x[2 * i + 1]});
    path.nodes.push_back(last_);
    return path;
  }

  double value(const Eigen::VectorXd &x) const {
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < interior_ + 2; ++k) {
      const Eigen::Vector2d d = node(x, k) - node(x, k + 1);
      total += lambda_[k] * d.dot(weight_ * d);
    }
    return 0.5 * total;
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd &x) const {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dimension());
    for (std::size_t k = 0; k + 1 < interior_ + 2; ++k) {
      const Eigen::Vector2d w = lambda_[k] * (weight_ * (node(x, k) - node(x, k + 1)));
      if (k >= 1)
        g.segment<2>(2 * (k - 1)) += w;
      if (k + 1 <= interior_)
        g.segment<2>(2 * k) -= w;
    }
    return g;
  }

  /// Constant block-tridiagonal Hessian.
  Eigen::SparseMatrix<double> hessian() const {
    std::vector<Eigen::Triplet<double>> entries;
    auto addBlock = [&](std::size_t bi, std::size_t bj, double scale) {
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
          entries.emplace_back(static_cast<int>(2 * bi) + r,
                               static_cast<int>(2 * bj) + c,
                               scale * weight_(r, c));
    };
    for (std::size_t i = 0; i < interior_; ++i) {
      addBlock(i, i, lambda_[i] + lambda_[i + 1]);
      if (i + 1 < interior_) {
        addBlock(i, i + 1, -lambda_[i + 1]);
        addBlock(i + 1, i, -lambda_[i + 1]);
      }
    }
    const auto n = static_cast<Eigen::Index>(dimension());
    Eigen::SparseMatrix<double> h(n, n);
    h.setFromTriplets(entries.begin(), entries.end());
    return h;
  }

private:
  Eigen::Vector2d node(const Eigen::VectorXd &x, std::size_t k) const {
    if (k == 0)
      return {first_.x, first_.y};
    if (k == interior_ + 1)
      return {last_.x, last_.y};
    return x.segment<2>(2 * (k - 1));
  }

  Eigen::Matrix2d weight_;
  Config first_;
  Config last_;
  std::vector<double> lambda_;
  std::size_t interior_;
};

/// Newton steps of the quadratic objective restricted to the null space of
/// a growing set of linear constraint rows.
class ConstrainedNewton {
public:
  explicit ConstrainedNewton(const Objective &objective)
      : objective_(objective), hessian_(objective.hessian()) {
    solver_.compute(hessian_);
  }

  void addConstraint(const Eigen::VectorXd &row) {
    const auto n = static_cast<Eigen::Index>(objective_.dimension());
    Eigen::MatrixXd grown(jacobian_.rows() + 1, n);
    if (jacobian_.rows() > 0)
      grown.topRows(jacobian_.rows()) = jacobian_;
    grown.row(grown.rows() - 1) = row.transpose();
    jacobian_ = std::move(grown);
    Eigen::MatrixXd hinvJt(n, jacobian_.rows());
    if (hinvJt_.cols() > 0)
      hinvJt.leftCols(hinvJt_.cols()) = hinvJt_;
    hinvJt.col(hinvJt.cols() - 1) = solver_.solve(row);
    hinvJt_ = std::move(hinvJt);
  }

  std::size_t constraintCount() const {
    return static_cast<std::size_t>(jacobian_.rows());
  }
  const Eigen::MatrixXd &jacobian() const { return jacobian_; }

  /// Full step -H^-1 grad L, H-orthogonally projected so that J * step = 0.
  Eigen::VectorXd step(const Eigen::VectorXd &x) const {
    Eigen::VectorXd delta = -solver_.solve(objective_.gradient(x));
    if (jacobian_.rows() == 0)
      return delta;
    const Eigen::MatrixXd schur = jacobian_ * hinvJt_;
    const Eigen::VectorXd mu =
        schur.completeOrthogonalDecomposition().solve(jacobian_ * delta);
    return delta - hinvJt_ * mu;
  }

private:
  const Objective &objective_;
  Eigen::SparseMatrix<double> hessian_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
  Eigen::MatrixXd jacobian_;
  Eigen::MatrixXd hinvJt_;
};

namespace detail {

struct Contact {
  std::size_t segment = 0; ///< segment between full-path nodes i and i+1
  double s = 0.0;          ///< parameter along that segment
  double depth = 0.0;
  const Obstacle *obstacle = nullptr; ///< nullptr: bounds violation
  Config boundsNormal{};
};

/// Deepest collision of a candidate path, or nullopt if it is free.
inline std::optional<Contact> deepestContact(const World &world,
                                             const Path &path, Clock &clock) {
  std::optional<Contact> deepest;
  const Box &b = world.bounds();
  auto consider = [&](const Contact &c) {
    if (!deepest || c.depth > deepest->depth)
      deepest = c;
  };
  for (std::size_t i = 0; i < path.nodes.size(); ++i) {
    const Config q = path.nodes[i];
    if (b.contains(q))
      continue;
    const std::size_t seg = i == 0 ? 0 : i - 1;
    const double s = i == 0 ? 0.0 : 1.0;
    const double dx = std::max(b.min.x - q.x, q.x - b.max.x);
    const double dy = std::max(b.min.y - q.y, q.y - b.max.y);
    Contact c{seg, s, std::max(dx, dy), nullptr, {}};
    if (dx >= dy)
      c.boundsNormal = q.x < b.min.x ? Config{1.0, 0.0} : Config{-1.0, 0.0};
    else
      c.boundsNormal = q.y < b.min.y ? Config{0.0, 1.0} : Config{0.0, -1.0};
    consider(c);
  }
  for (std::size_t i = 0; i + 1 < path.nodes.size(); ++i) {
    clock.charge(Work::SegmentCheck);
    for (const Obstacle &o : world.obstacles())
      if (const auto pen = o.penetration(path.nodes[i], path.nodes[i + 1]))
        consider({i, pen->second, pen->first, &o, {}});
  }
  return deepest;
}

} // namespace detail

/// Gradient-based path shortening. Small steps towards the constrained
/// minimum are taken until a collision appears; the collision is then
/// linearised at the last collision-free iterate and added as a constraint,
/// after which a full step to the new constrained minimum is attempted. A
/// colliding full step reverts to small steps. Returns the shortest
/// collision-free iterate, or the input when nothing shorter was found.
inline Path optimize(const World &world, const Path &input,
                     const Params &params, Clock &clock, double deadline) {
  if (input.nodes.size() < 3 || clock.now() >= deadline)
    return input;
  // Zero-length segments carry no direction; drop repeated nodes.
  Path path;
  for (Config q : input.nodes)
    if (path.nodes.empty() || !(path.nodes.back() == q))
      path.nodes.push_back(q);
  if (!(path.nodes.back() == input.nodes.back()))
    path.nodes.push_back(input.nodes.back());
  if (path.nodes.size() < 3)
    return path.nodes.size() == 2 ? path : input;

  const Objective objective(path, params.weight);
  ConstrainedNewton newton(objective);
  Eigen::VectorXd x = objective.pack(path);
  Path best = input;
  double bestLength = pathLength(input);
  bool fullStep = false;

  for (std::size_t it = 0; it < params.maxOuterIterations; ++it) {
    if (clock.now() >= deadline)
      break;
    clock.charge(Work::Iteration);
    const Eigen::VectorXd delta = newton.step(x);
    if (delta.lpNorm<Eigen::Infinity>() < params.convergenceTol)
      break;
    const double alpha = fullStep ? 1.0 : params.alphaSmall;
    const Eigen::VectorXd candidate = x + alpha * delta;
    const Path candidatePath = objective.unpack(candidate);
    const auto contact = detail::deepestContact(world, candidatePath, clock);
    if (!contact) {
      x = candidate;
      const double len = pathLength(candidatePath);
      if (len < bestLength) {
        bestLength = len;
        best = candidatePath;
      }
      if (alpha * delta.lpNorm<Eigen::Infinity>() < params.convergenceTol)
        break;
      continue;
    }
    if (fullStep) {
      fullStep = false;
      continue;
    }
    // Linearise the contact at the current collision-free iterate.
    const Path current = objective.unpack(x);
    const std::size_t j = contact->segment;
    const double s = contact->s;
    const Config point =
        current.nodes[j] + (current.nodes[j + 1] - current.nodes[j]) * s;
    Config normal = contact->boundsNormal;
    if (contact->obstacle)
      normal = contact->obstacle->closestBoundaryPoint(point).second;
    Eigen::VectorXd row = Eigen::VectorXd::Zero(
        static_cast<Eigen::Index>(objective.dimension()));
    const std::size_t interior = objective.dimension() / 2;
    auto addNode = [&](std::size_t fullIndex, double weight) {
      if (fullIndex == 0 || fullIndex > interior || weight == 0.0)
        return;
      const auto col = static_cast<Eigen::Index>(2 * (fullIndex - 1));
      row[col] += weight * normal.x;
      row[col + 1] += weight * normal.y;
    };
    addNode(j, 1.0 - s);
    addNode(j + 1, s);
    if (row.squaredNorm() > 0.0)
      newton.addConstraint(row);
    fullStep = true;
  }
  return best;
}

} // namespace oirrt::gb
