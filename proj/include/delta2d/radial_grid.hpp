#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "delta2d/errors.hpp"
#include "delta2d/kernels.hpp"

namespace delta2d {

template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Gauss-Legendre nodes and weights on [-1, 1], ascending.
template <class Scalar>
std::pair<Vector<Scalar>, Vector<Scalar>> gauss_legendre(int order) {
  if (order < 1) throw domain_error("gauss_legendre: order must be >= 1");
  Vector<Scalar> x(order), w(order);
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    Scalar z = std::cos(pi_v<Scalar> * (Scalar(i) + Scalar(0.75)) / (Scalar(order) + Scalar(0.5)));
    Scalar dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      Scalar p0 = 1, p1 = 0;
      for (int k = 1; k <= order; ++k) {
        const Scalar p2 = p1;
        p1 = p0;
        p0 = ((Scalar(2 * k - 1)) * z * p1 - Scalar(k - 1) * p2) / Scalar(k);
      }
      dp = Scalar(order) * (z * p0 - p1) / (z * z - Scalar(1));
      const Scalar dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) <= Scalar(4) * eps) break;
    }
    // Recompute the derivative at the converged root.
    Scalar p0 = 1, p1 = 0;
    for (int k = 1; k <= order; ++k) {
      const Scalar p2 = p1;
      p1 = p0;
      p0 = ((Scalar(2 * k - 1)) * z * p1 - Scalar(k - 1) * p2) / Scalar(k);
    }
    dp = Scalar(order) * (z * p0 - p1) / (z * z - Scalar(1));
    x(i) = -z;
    x(order - 1 - i) = z;
    w(i) = w(order - 1 - i) = Scalar(2) / ((Scalar(1) - z * z) * dp * dp);
  }
  if (order % 2 == 1) x(order / 2) = 0;
  return {x, w};
}

enum class GridMap { log, linear };

/// Quadrature for radial integrals int_{q_min}^{q_max} f(q) dq.
///
/// weights() integrate against dq; planar_weights() fold in the 2D measure
/// 2 pi q so that sum planar_w[i] f(q_i) approximates int d^2p f(|p|).
template <class Scalar>
class BasicRadialGrid {
 public:
  BasicRadialGrid(Vector<Scalar> nodes, Vector<Scalar> weights, GridMap map)
      : nodes_(std::move(nodes)), weights_(std::move(weights)), map_(map) {
    if (nodes_.size() == 0 || nodes_.size() != weights_.size())
      throw domain_error("RadialGrid: nodes and weights must be non-empty and equal length");
    for (Eigen::Index i = 0; i < nodes_.size(); ++i) {
      if (!(weights_(i) > 0)) throw domain_error("RadialGrid: weights must be positive");
      if (!(nodes_(i) > 0)) throw domain_error("RadialGrid: nodes must be positive");
      if (i > 0 && !(nodes_(i) > nodes_(i - 1)))
        throw domain_error("RadialGrid: nodes must be strictly increasing");
    }
    planar_ = Scalar(2) * pi_v<Scalar> * weights_.cwiseProduct(nodes_);
  }

  Eigen::Index size() const { return nodes_.size(); }
  const Vector<Scalar>& nodes() const { return nodes_; }
  const Vector<Scalar>& weights() const { return weights_; }
  const Vector<Scalar>& planar_weights() const { return planar_; }
  Scalar q_min() const { return q_min_; }
  Scalar q_max() const { return q_max_; }
  GridMap map() const { return map_; }

  template <class F>
  Scalar integrate(F&& f) const {
    Scalar s = 0;
    for (Eigen::Index i = 0; i < size(); ++i) s += weights_(i) * f(nodes_(i));
    return s;
  }

  /// int d^2p f(|p|) over the annulus q_min <= |p| <= q_max.
  template <class F>
  Scalar integrate_planar(F&& f) const {
    Scalar s = 0;
    for (Eigen::Index i = 0; i < size(); ++i) s += planar_(i) * f(nodes_(i));
    return s;
  }

  template <class F>
  Vector<Scalar> sample(F&& f) const {
    Vector<Scalar> v(size());
    for (Eigen::Index i = 0; i < size(); ++i) v(i) = f(nodes_(i));
    return v;
  }

  void set_domain(Scalar lo, Scalar hi) {
    q_min_ = lo;
    q_max_ = hi;
  }

 private:
  Vector<Scalar> nodes_;
  Vector<Scalar> weights_;
  Vector<Scalar> planar_;
  Scalar q_min_ = 0;
  Scalar q_max_ = 0;
  GridMap map_;
};

using RadialGrid = BasicRadialGrid<double>;

/// Composite Gauss-Legendre rule with `panels_per_segment` panels between each
/// consecutive pair of breakpoints. Log map: panels are equally spaced in log q and
/// the Gauss rule is applied in the variable t = log q.
template <class Scalar>
BasicRadialGrid<Scalar> build_radial_grid(std::vector<Scalar> breakpoints, int panels_per_segment,
                                          int order, GridMap map = GridMap::log) {
  if (breakpoints.size() < 2) throw domain_error("build_radial_grid: need at least two breakpoints");
  if (panels_per_segment < 1 || order < 1)
    throw domain_error("build_radial_grid: panels and order must be >= 1");
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());
  if (breakpoints.size() < 2 || !(breakpoints.front() > 0) || !std::isfinite(breakpoints.back()))
    throw domain_error("build_radial_grid: require 0 < q_min < q_max < inf");

  const auto [x, w] = gauss_legendre<Scalar>(order);
  const auto segments = static_cast<int>(breakpoints.size()) - 1;
  const Eigen::Index n = Eigen::Index(segments) * panels_per_segment * order;
  Vector<Scalar> nodes(n), weights(n);
  Eigen::Index k = 0;
  for (int s = 0; s < segments; ++s) {
    const Scalar lo = breakpoints[s], hi = breakpoints[s + 1];
    for (int p = 0; p < panels_per_segment; ++p) {
      if (map == GridMap::log) {
        const Scalar t0 = std::log(lo) + (std::log(hi) - std::log(lo)) * Scalar(p) / panels_per_segment;
        const Scalar t1 = std::log(lo) + (std::log(hi) - std::log(lo)) * Scalar(p + 1) / panels_per_segment;
        const Scalar half = (t1 - t0) / 2, mid = (t1 + t0) / 2;
        for (int j = 0; j < order; ++j, ++k) {
          nodes(k) = std::exp(mid + half * x(j));
          weights(k) = half * w(j) * nodes(k);
        }
      } else {
        const Scalar a = lo + (hi - lo) * Scalar(p) / panels_per_segment;
        const Scalar b = lo + (hi - lo) * Scalar(p + 1) / panels_per_segment;
        const Scalar half = (b - a) / 2, mid = (b + a) / 2;
        for (int j = 0; j < order; ++j, ++k) {
          nodes(k) = mid + half * x(j);
          weights(k) = half * w(j);
        }
      }
    }
  }
  BasicRadialGrid<Scalar> grid(std::move(nodes), std::move(weights), map);
  grid.set_domain(breakpoints.front(), breakpoints.back());
  return grid;
}

template <class Scalar>
BasicRadialGrid<Scalar> build_radial_grid(Scalar q_min, Scalar q_max, int panels, int order,
                                          GridMap map = GridMap::log) {
  if (!(q_min > 0) || !(q_max > q_min)) throw domain_error("build_radial_grid: require 0 < q_min < q_max");
  return build_radial_grid<Scalar>(std::vector<Scalar>{q_min, q_max}, panels, order, map);
}

struct SchurBound {
  double lhs;
  double rhs;
};

/// Evaluates both sides of |int int h(p) (p^2 + q^2 + c)^{-1} h'(q) dp dq| <= pi^2 |h|_2 |h'|_2
/// for radial h, h' sampled on the grid (2D integrals reduced radially).
SchurBound schur_bilinear_bound_check(const RadialGrid& grid, const Eigen::VectorXd& h,
                                      const Eigen::VectorXd& h_prime, double c);

}  // namespace delta2d
