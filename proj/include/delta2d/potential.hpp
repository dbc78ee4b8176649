#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "delta2d/radial_grid.hpp"

namespace delta2d {

/// amplitude * exp(-r^2 / (2 width^2))
struct GaussianTerm {
  double amplitude;
  double width;
};

/// Bounded radial potential v(r) = offset + compact part.
///
/// The offset is the value at infinity and acts in momentum space as offset * identity.
/// The compact part is either a sum of Gaussians (Hankel kernels in closed form) or a
/// piecewise-linear sampled profile that vanishes beyond its last radius.
class Potential {
 public:
  static Potential zero();
  static Potential constant(double c);
  static Potential gaussians(std::vector<GaussianTerm> terms, double offset = 0.0);
  /// Linear interpolation through (r_i, v_i); constant v_0 on [0, r_0] and v_last beyond the last radius.
  static Potential from_samples(std::vector<double> radii, std::vector<double> values);
  /// Two-column whitespace-separated text (radius, value); '#' starts a comment.
  static Potential from_file(const std::string& path);

  double operator()(double r) const;
  double offset() const { return offset_; }
  double sup_norm() const { return sup_norm_; }
  bool is_zero() const { return sup_norm_ == 0.0; }
  /// Largest radius where the compact part is nonzero (0 for constants).
  double support_radius() const;

  const std::vector<GaussianTerm>& gaussian_terms() const { return terms_; }

  /// int_0^inf (v(r) - offset) J_l(p r) J_l(q r) r dr.
  double hankel_kernel(int ell, double p, double q) const;

  /// Two-dimensional Fourier transform of the compact part, int (v - offset) e^{-i k x} d^2x.
  double fourier_transform(double k) const;

  /// Symmetric matrix of v' restricted to harmonic l, in the coordinates x_i = sqrt(W_i) f(q_i)
  /// with W the planar weights (so the L^2 inner product is the Euclidean one).
  Eigen::MatrixXd channel_matrix(const RadialGrid& grid, int ell) const;

 private:
  Potential() = default;
  void finalize();
  double profile_part(double r) const;

  double offset_ = 0.0;
  std::vector<GaussianTerm> terms_;
  std::vector<double> radii_;   ///< sampled profile, compact part (value minus offset)
  std::vector<double> values_;
  double sup_norm_ = 0.0;
};

/// exp(-x) I_nu(x) for x >= 0.
double bessel_i_scaled(int nu, double x);

}  // namespace delta2d
