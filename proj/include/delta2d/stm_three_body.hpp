#pragma once

// Three identical bosons with a renormalized point interaction, total momentum zero,
// fixed angular momentum. Phi(E) restricted to one spectator momentum q (angel at -q):
//
//   (Phi f)(q) = D(q) f(q) + int K(q, q') f(q') d^2q'
//   D(q)       = (4 pi)^{-1} log((3 q^2 / 4 - E) / mu^2)
//   K(q, q')   = -(2 pi^2)^{-1} (q^2 + q'^2 + q.q' - E)^{-1}
//
// discretized on a radial grid with sqrt(w q) symmetrization. Bound states are the
// energies where an eigenvalue of Phi(E) crosses zero.

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "delta2d/kernels.hpp"
#include "delta2d/radial_grid.hpp"

namespace delta2d {

struct StmOperator {
  double energy = 0;
  double mu = 1;
  int ell = 0;
  RadialGrid grid;
  Eigen::VectorXd diagonal;  ///< D(q_i)
  Eigen::MatrixXd kernel;    ///< symmetrized angular-projected kernel, all entries negative

  Eigen::MatrixXd matrix() const;
};

/// Zero of (4 pi)^{-1} log((P^2/4 - E)/mu^2): the dimer riding on total momentum P.
double dimer_energy_from_phi(double mu, double total_momentum = 0.0);

/// (1 / 2 pi) int cos(l theta) / (A + B cos theta) d theta; the l = 0 value is exact,
/// other harmonics use a periodic trapezoid rule.
double angular_projection(double a, double b, int ell);

StmOperator build_stm_operator(double mu, double energy, const RadialGrid& grid, int ell = 0);

/// Ascending spectrum of the symmetric matrix.
Eigen::VectorXd stm_eigenvalues(const StmOperator& op);
double smallest_eigenvalue(const StmOperator& op);

/// Momentum grid for the s-wave problem: log-spaced Gauss panels on [q_min mu, q_max mu].
struct StmGridSpec {
  double q_min = 1e-6;  ///< in units of mu
  double q_max = 1e6;
  int nodes = 400;
  int order = 10;
};
RadialGrid build_stm_grid(double mu, const StmGridSpec& spec);

/// Same grid with every momentum multiplied by s.
RadialGrid scale_grid(const RadialGrid& grid, double s);

struct StmSchedule {
  std::vector<int> nodes{200, 400, 800};
  int order = 10;
  double q_min = 1e-6;
  double q_max = 1e6;
  int ell = 0;
  double relative_tolerance = 1e-8;
  int scan_points = 0;  ///< optional (E, eigenvalue) table per grid
  int jobs = 1;
};

struct ScanPoint {
  double energy;
  double smallest;     ///< smallest eigenvalue of Phi(E)
  int negative_count;  ///< number of negative eigenvalues
};

struct GridTrimers {
  int nodes = 0;
  std::vector<double> energies;  ///< ascending (deepest first)
  std::vector<ScanPoint> scan;
};

struct TrimerResult {
  double mu = 1;
  std::pair<double, double> bracket;
  std::vector<GridTrimers> grids;     ///< one entry per schedule element, in schedule order
  std::vector<double> energies;       ///< finest grid
  std::vector<double> extrapolated;   ///< Aitken estimate across the last three grids (finest when unreliable)
  std::vector<double> relative_drift; ///< |E_finest - E_previous| / |E_finest|
  double log_e3 = 0;                  ///< log e_3, recorded informationally
  bool above_minus_e3 = true;         ///< every energy >= -e_3 (checked in log space)
};

/// Zero crossings of the eigenvalues of Phi(E) inside bracket = (E_low, E_high), E_high < -mu^2.
/// Throws bracket_error when a crossing sits on (or below) the lower edge, or when the grids
/// disagree on the number of crossings.
TrimerResult find_trimer_energies(double mu, std::pair<double, double> bracket, const StmSchedule& schedule = {});

/// The energy-independent operator W = Phi(-1) at mu = 1: every trimer energy is
/// E = -mu^2 exp(-4 pi w) for a negative eigenvalue w of W.
struct ScaledOperator {
  Eigen::MatrixXd w;
  Eigen::VectorXd eigenvalues;
  std::vector<double> negative;  ///< eigenvalues below -1e-8, ascending

  std::vector<double> energies(double mu) const;
};
ScaledOperator scaled_operator_w(const RadialGrid& grid, int ell = 0);

/// max |Phi(E) on the grid scaled by sqrt(-E) - (4 pi)^{-1} log(-E / mu^2) - W|.
double scaling_identity_residual(double mu, double energy, const RadialGrid& grid, int ell = 0);

}  // namespace delta2d
