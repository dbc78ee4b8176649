#pragma once

// Two-body point interaction plus a bounded radial potential v: H# = -Delta + v - g delta.
//
// Linear algebra is done in the coordinates x_i = sqrt(W_i) f(q_i) (W the planar
// weights of the grid), where the L^2 inner product is Euclidean and v' is a
// symmetric matrix per angular harmonic.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <vector>

#include "delta2d/kernels.hpp"
#include "delta2d/potential.hpp"
#include "delta2d/two_body.hpp"

namespace delta2d {

/// v' = F v F^{-1} on the grid, harmonics 0..max_ell.
class PotentialOperator {
 public:
  PotentialOperator(RadialGrid grid, Potential potential, int max_ell = 1);

  const RadialGrid& grid() const { return grid_; }
  const Potential& potential() const { return potential_; }
  int max_ell() const { return static_cast<int>(channels_.size()) - 1; }
  const Eigen::MatrixXd& channel(int ell) const;

  GridFunction apply(const GridFunction& psi) const;

  Eigen::VectorXd to_coords(const Eigen::VectorXd& f) const { return sqrt_w_.cwiseProduct(f); }
  Eigen::VectorXd from_coords(const Eigen::VectorXd& x) const { return x.cwiseQuotient(sqrt_w_); }

 private:
  RadialGrid grid_;
  Potential potential_;
  std::vector<Eigen::MatrixXd> channels_;
  Eigen::VectorXd sqrt_w_;
};

/// Factorized H1 - E = H0 + v' - E on every harmonic channel of an operator.
class ShiftedHamiltonian {
 public:
  ShiftedHamiltonian(const PotentialOperator& op, double energy);

  double energy() const { return energy_; }
  /// (H1 - E)^{-1} in coordinates.
  Eigen::VectorXd solve(const Eigen::VectorXd& x, int ell) const;
  /// (H1 - E) in coordinates.
  Eigen::VectorXd multiply(const Eigen::VectorXd& x, int ell) const;

 private:
  double energy_;
  std::vector<Eigen::MatrixXd> shifted_;
  std::vector<Eigen::LLT<Eigen::MatrixXd>> factors_;
};

/// R1(E) psi by dense solve; requires E < -|v|_inf. Residual checked against 1e-8 |psi|.
GridFunction resolvent_r1(const PotentialOperator& op, double energy, const GridFunction& psi);

struct SharpDenominator {
  double total;         ///< xi + first_order - second_order
  double xi;            ///< xi(mu^2, -E)
  double first_order;   ///< (Omega_E, v' Omega_E)
  double second_order;  ///< (Omega_E, v' R1(E) v' Omega_E)
};

SharpDenominator denominator_sharp(const PotentialOperator& op, double mu, double energy);

struct DressedVector {
  GridFunction omega1;  ///< Omega_{1,E} = Omega_E - R1(E) v' Omega_E
  double energy;
};

DressedVector dressed_vector(const PotentialOperator& op, double energy);

/// R1(E) + scalar * P_vector with R1 applied on every channel of the operator.
class SharpResolvent {
 public:
  SharpResolvent(const PotentialOperator& op, double energy, double scalar, Eigen::VectorXd vector_coords);

  GridFunction apply(const GridFunction& psi) const;
  double scalar() const { return scalar_; }
  double energy() const { return h1_.energy(); }

 private:
  ShiftedHamiltonian h1_;
  Eigen::VectorXd sqrt_w_;
  double scalar_;
  Eigen::VectorXd vector_;
};

/// R#(E) = R1(E) + denominator^{-1} P_{Omega_{1,E}}.
SharpResolvent resolvent_sharp(const PotentialOperator& op, double mu, double energy);

/// The cutoff family R#_Lambda(E) = R1 + [xi_Lambda(mu^2, -E) + (rho, R1 v' R0 rho)]^{-1} P_{R1 rho}.
SharpResolvent resolvent_sharp_cutoff(const PotentialOperator& op, const CutoffModel& model, double energy);

/// max(|v|_inf + 1, mu^2 e^{|v|_inf + 1}).
double e0_bound(const Potential& potential, double mu);

struct SharpRootSearch {
  int scan_panels = 64;
  double relative_tolerance = 1e-10;
};

/// Zeros of denominator_sharp in [e_low, e_high], each a discrete eigenvalue of H#(mu)
/// with eigenvector Omega_{1,E}. An empty report means no sign change.
SpectralReport find_bound_states_sharp(const PotentialOperator& op, double mu, double e_low, double e_high,
                                       const SharpRootSearch& search = {});

}  // namespace delta2d
