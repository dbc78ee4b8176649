#pragma once

// Exact and cutoff two-body point-interaction resolvents in the relative
// coordinate, H0 = p^2. All functions of momentum are stored as radial profiles
// times a single angular harmonic e^{i l theta}; the point interaction only acts
// on the l = 0 channel.

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "delta2d/kernels.hpp"
#include "delta2d/radial_grid.hpp"

namespace delta2d {

struct GridFunction {
  Eigen::VectorXd values;  ///< radial profile f(|p|) at the grid nodes
  int ell = 0;             ///< angular harmonic: psi(p) = f(|p|) e^{i ell theta}
};

/// L^2(R^2) inner product; zero across different harmonics.
double inner(const RadialGrid& grid, const GridFunction& u, const GridFunction& v);
double norm(const RadialGrid& grid, const GridFunction& u);
double max_abs_difference(const GridFunction& u, const GridFunction& v);

/// R0(E) psi = psi / (p^2 - E).
GridFunction free_resolvent(const RadialGrid& grid, double energy, const GridFunction& psi);

/// Base resolvent R0(E) plus scalar times the projection onto a radial vector:
///   R psi = R0(E) psi + scalar * <vector, psi> * vector.
class RankOneResolvent {
 public:
  RankOneResolvent(RadialGrid grid, double energy, double scalar, Eigen::VectorXd vector);

  GridFunction apply(const GridFunction& psi) const;

  double energy() const { return energy_; }
  double scalar() const { return scalar_; }
  const Eigen::VectorXd& vector() const { return vector_; }
  const RadialGrid& grid() const { return grid_; }

 private:
  RadialGrid grid_;
  double energy_;
  double scalar_;
  Eigen::VectorXd vector_;
};

struct SpectralCondition {
  bool in_resolvent_set;
  double margin;  ///< xi_Lambda(mu^2, -E); zero exactly at the bound state
};

/// Pole tolerance on |xi_Lambda(mu^2, -E)|.
inline constexpr double pole_tolerance = 1e-8;

SpectralCondition spectral_condition(const CutoffModel& model, double energy);

/// R_Lambda(E) with (rho_Lambda, R0(E) rho_Lambda) in closed form. For an infinite
/// model this is the renormalized limit R(E).
RankOneResolvent resolvent_cutoff(const RadialGrid& grid, const CutoffModel& model, double energy);
GridFunction resolvent_cutoff(const RadialGrid& grid, const CutoffModel& model, double energy,
                              const GridFunction& psi);

/// R(E) = R0(E) + xi(mu^2, -E)^{-1} P_{Omega_E}, Omega_E(p) = (p^2 - E)^{-1}.
RankOneResolvent resolvent_exact(const RadialGrid& grid, double mu, double energy);
GridFunction resolvent_exact(const RadialGrid& grid, double mu, double energy, const GridFunction& psi);

/// Omega_E(p) = (p^2 - E)^{-1} sampled on the grid.
Eigen::VectorXd omega_vector(const RadialGrid& grid, double energy);

/// Closed form |Omega_E|_2^2 = pi / |E|.
inline double omega_norm_squared(double energy) { return std::numbers::pi / std::abs(energy); }

struct BoundState {
  double energy;
  GridFunction wavefunction;  ///< unit L^2 norm in the continuum
};

/// The renormalized bound state -mu^2 with normalized Omega_{-mu^2}.
BoundState bound_state(const RadialGrid& grid, double mu);

/// Zero of the cutoff spectral margin; equals -mu^2 at every finite Lambda.
double cutoff_bound_state_energy(const CutoffModel& model);

/// Albeverio-Gesztesy-Hoegh-Krohn-Holden parametrization: log mu = -2 pi alpha + Psi(1) + log 2.
double aghh_alpha_from_mu(double mu);
double aghh_mu_from_alpha(double alpha);

struct Probe {
  std::string name;
  std::function<double(double)> radial;
  int ell = 0;

  GridFunction on(const RadialGrid& grid) const { return {grid.sample(radial), ell}; }
};

/// Gaussians at three widths and one l = 1 harmonic.
std::vector<Probe> default_probes();

struct ConvergenceRow {
  double energy;
  std::string probe;
  std::vector<double> errors;  ///< |R_Lambda(E) psi - R(E) psi| per cutoff
  double slope;                ///< NaN when every error is exactly zero (l != 0 probes)
};

struct SpectralReport {
  std::vector<double> energies;
  std::vector<GridFunction> eigenvectors;
  std::vector<double> lambda_schedule;
  std::vector<double> rates;
  std::vector<ConvergenceRow> rows;
  std::vector<double> cutoff_energies;  ///< cutoff bound-state energy per Lambda
};

struct ConvergenceGridSpec {
  double q_min = 1e-6;
  double q_max = 1e6;
  int panels_per_segment = 8;
  int order = 16;
};

/// Measures |R_Lambda(E) psi - R(E) psi| over the schedule for each energy and probe and
/// fits the log-log decay rate.
SpectralReport convergence_report(double mu, const std::vector<double>& energies,
                                  const std::vector<double>& lambda_schedule,
                                  const std::vector<Probe>& probes,
                                  const ConvergenceGridSpec& spec = {});

}  // namespace delta2d
