#pragma once

// Test-only reference computations, written independently of the library code paths
// they check: adaptive quadrature, dense matrices, closed-form special cases.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

#include "delta2d/radial_grid.hpp"

namespace oracle {

inline constexpr double pi = std::numbers::pi;

/// Adaptive Gauss-Kronrod (7/15) on [a, b] to absolute tolerance tol.
inline double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-12,
                        int depth = 0) {
  static const double xk[8] = {0.991455371120812639, 0.949107912342758525, 0.864864423359769073,
                               0.741531185599394440, 0.586087235467691130, 0.405845151377397167,
                               0.207784955007898468, 0.0};
  static const double wk[8] = {0.022935322010529225, 0.063092092629978553, 0.104790010322250184,
                               0.140653259715525919, 0.169004726639267903, 0.190350578064785410,
                               0.204432940075298892, 0.209482141084727828};
  static const double wg[4] = {0.129484966168869693, 0.279705391489276668, 0.381830050505118945,
                               0.417959183673469388};
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double kron = wk[7] * f(c), gauss = wg[3] * f(c);
  for (int i = 0; i < 7; ++i) {
    const double s = f(c - h * xk[i]) + f(c + h * xk[i]);
    kron += wk[i] * s;
    if (i % 2 == 1) gauss += wg[i / 2] * s;
  }
  kron *= h;
  gauss *= h;
  if (std::abs(kron - gauss) <= tol || depth > 40) return kron;
  return integrate(f, a, c, 0.5 * tol, depth + 1) + integrate(f, c, b, 0.5 * tol, depth + 1);
}

/// (1/2pi) int_0^{2pi} cos(l t) / (a + b cos t) dt for a > |b|, by contour integration.
inline double angular_harmonic(double a, double b, int ell) {
  const double root = std::sqrt(a * a - b * b);
  if (b == 0) return ell == 0 ? 1.0 / a : 0.0;
  return std::pow((root - a) / b, ell) / root;
}

/// Digamma at 1 by a centered difference of log Gamma.
inline double digamma_one() {
  const double h = 1e-5;
  return (std::lgamma(1.0 + h) - std::lgamma(1.0 - h)) / (2.0 * h);
}

/// Dense s-wave matrix of H_Lambda = p^2 - g (2pi)^-2 |rho><rho| in coordinates x_i = sqrt(W_i) f(q_i),
/// W the planar weights. Its inverse after shifting by E is the reference cutoff resolvent.
inline Eigen::MatrixXd dense_cutoff_hamiltonian(const delta2d::RadialGrid& grid, double g, double lambda) {
  const auto n = grid.size();
  const Eigen::VectorXd& q = grid.nodes();
  const Eigen::VectorXd sw = grid.planar_weights().cwiseSqrt();
  Eigen::VectorXd u(n);
  for (Eigen::Index i = 0; i < n; ++i) u(i) = q(i) <= lambda ? sw(i) : 0.0;
  Eigen::MatrixXd h = -g / (4.0 * pi * pi) * u * u.transpose();
  h.diagonal() += q.cwiseProduct(q);
  return h;
}

/// Reference cutoff resolvent R_Lambda(E) f by a dense LU solve.
inline Eigen::VectorXd dense_cutoff_resolvent(const delta2d::RadialGrid& grid, double g, double lambda,
                                              double energy, const Eigen::VectorXd& f) {
  Eigen::MatrixXd h = dense_cutoff_hamiltonian(grid, g, lambda);
  h.diagonal().array() -= energy;
  const Eigen::VectorXd sw = grid.planar_weights().cwiseSqrt();
  const Eigen::VectorXd x = h.partialPivLu().solve(sw.cwiseProduct(f));
  return x.cwiseQuotient(sw);
}

/// (Phi f)(q) for the s-wave three-boson operator at one momentum, by direct two-dimensional
/// quadrature of -(2 pi^2)^-1 int d^2q' f(|q'|) / (q^2 + q'^2 + q q' cos t - E) plus the diagonal.
inline double stm_apply_2d(double mu, double energy, double q, const std::function<double(double)>& f,
                           double log_lo, double log_hi) {
  const double diag = std::log((0.75 * q * q - energy) / (mu * mu)) / (4.0 * pi) * f(q);
  auto radial = [&](double t) {
    const double qp = std::exp(t);
    auto angular = [&](double th) { return 1.0 / (q * q + qp * qp + q * qp * std::cos(th) - energy); };
    const double ang = integrate(angular, 0.0, pi, 1e-14) * 2.0;
    return qp * qp * f(qp) * ang;  // d^2q' = q' dq' dt, dq' = q' dt in the log variable
  };
  // Split the log range so each panel is smooth.
  double s = 0;
  const int pieces = 48;
  for (int k = 0; k < pieces; ++k) {
    const double a = log_lo + (log_hi - log_lo) * k / pieces, b = log_lo + (log_hi - log_lo) * (k + 1) / pieces;
    s += integrate(radial, a, b, 1e-13);
  }
  return diag - s / (2.0 * pi * pi);
}

}  // namespace oracle
