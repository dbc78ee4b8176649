#pragma once

// Per-sector assembly shared by the builders and the identity checks.

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "delta2d/fock.hpp"

namespace delta2d::fock::detail {

struct Context {
  Context(const FockSpace& space, const CutoffModel* model);

  const FockSpace& space;
  std::vector<double> omega;       ///< many-body dispersion per mode
  Eigen::MatrixXd rho;             ///< rho_Lambda((p_i - p_j) / 2)
  Eigen::MatrixXd beta;            ///< sqrt(w_i w_j) rho_ij / sqrt(W_k(ij))
  std::vector<std::vector<std::pair<int, int>>> by_slot;  ///< ordered pairs per angel slot
  std::vector<Eigen::VectorXd> kinetic;                    ///< H0 diagonal per sector
};

/// b_i b_j |state>; returns the target index in sector n - 2 or -1 when the result vanishes.
int annihilate2(const FockSpace& space, int n, int state, int i, int j, double& amplitude);
int create2(const FockSpace& space, int n, int state, int i, int j, double& amplitude);
int annihilate1(const FockSpace& space, int n, int state, int i, double& amplitude);
int create1(const FockSpace& space, int n, int state, int i, double& amplitude);

Eigen::MatrixXd b_block(const Context& c, int n);
Eigen::MatrixXd h_interaction_block(const Context& c, double g, int n);
Eigen::MatrixXd potential_block(const FockSpace& space, const Potential& potential, int n);
Eigen::MatrixXd phi_block(const Context& c, double g_inverse, double energy, int n_angel);
double g_inverse(const CutoffModel& model, const char* who);

}  // namespace delta2d::fock::detail
