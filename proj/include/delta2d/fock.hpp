#pragma once

// Truncated Fock space over a finite set of lattice momenta p_i = h n_i, n_i in Z^2.
//
// Discrete normalization: the continuum a(p) becomes a_i with [a_i, a*_j] = delta_ij / w_i,
// so that sums sum_i w_i f(p_i) stand in for integrals. Matrices are written in the
// orthonormal occupation basis (b_i = sqrt(w_i) a_i are standard bosonic operators),
// where every starred operator is the transpose of its partner.
//
// Angels carry momenta on the exact sumset {p_i + p_j} of the particle lattice, with
// the discrete delta delta(P - P') -> delta_{PP'} / W_P and W_P = h^2.

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "delta2d/kernels.hpp"
#include "delta2d/potential.hpp"

namespace delta2d::fock {

struct FockGrid {
  std::vector<Eigen::Vector2i> lattice;  ///< integer coordinates of the momenta
  double spacing = 1.0;                  ///< h
  std::vector<double> weights;           ///< quadrature weight per momentum
  int n_max = 4;

  /// The (2k+1)^2 points {-k..k}^2, weights h^2.
  static FockGrid lattice_box(int half_width, double spacing, int n_max);
  /// Distinct integer points; weights default to h^2.
  static FockGrid from_points(std::vector<Eigen::Vector2i> points, double spacing, int n_max,
                              std::vector<double> weights = {});

  int size() const { return static_cast<int>(lattice.size()); }
  Eigen::Vector2d momentum(int i) const { return spacing * lattice[i].cast<double>(); }
};

using Occupation = std::vector<std::uint8_t>;

/// Particle sectors H_0..H_nmax and angel sectors H~_n = C^K (x) H_n.
class FockSpace {
 public:
  explicit FockSpace(FockGrid grid);

  const FockGrid& grid() const { return grid_; }
  int modes() const { return grid_.size(); }
  int n_max() const { return grid_.n_max; }

  int dim(int n) const;
  int angel_dim(int n) const { return angel_count() * dim(n); }
  const std::vector<Occupation>& states(int n) const { return states_.at(n); }
  /// Index of an occupation in its sector, -1 if absent.
  int index(const Occupation& occ) const;

  int angel_count() const { return static_cast<int>(angel_lattice_.size()); }
  Eigen::Vector2d angel_momentum(int k) const { return grid_.spacing * angel_lattice_[k].cast<double>(); }
  double angel_weight(int k) const { return angel_weights_[k]; }
  /// Angel slot holding p_i + p_j.
  int pair_slot(int i, int j) const { return pair_slot_[i * modes() + j]; }
  /// Angel slot holding an arbitrary lattice point, -1 when the point is not a pair sum.
  int angel_slot(const Eigen::Vector2i& point) const;
  /// Particle mode at a lattice point, -1 when absent.
  int particle_slot(const Eigen::Vector2i& point) const;

  /// Total kinetic energy sum_i n_i omega(p_i) of a basis state.
  double kinetic(int n, int state, Dispersion convention) const;

 private:
  FockGrid grid_;
  std::vector<std::vector<Occupation>> states_;
  std::map<Occupation, int> index_;
  std::vector<Eigen::Vector2i> angel_lattice_;
  std::vector<double> angel_weights_;
  std::vector<int> pair_slot_;
  std::map<std::pair<int, int>, int> particle_lookup_;
  std::map<std::pair<int, int>, int> angel_lookup_;
};

enum class Space { particles, angel };

/// Block operator between Fock sectors; blocks keyed by (source sector, target sector).
struct SectorOperator {
  Space domain = Space::particles;
  Space codomain = Space::particles;
  std::optional<Dispersion> dispersion;
  std::map<std::pair<int, int>, Eigen::MatrixXd> blocks;

  const Eigen::MatrixXd& block(int from, int to) const;
  bool has_block(int from, int to) const { return blocks.count({from, to}) != 0; }
};

/// Transposed operator (the adjoint in the orthonormal real basis).
SectorOperator adjoint(const SectorOperator& op);
/// Sum of operators with identical block structure; mixing dispersion conventions throws.
SectorOperator operator+(const SectorOperator& a, const SectorOperator& b);

struct Ladder {
  std::vector<SectorOperator> annihilators;  ///< a_i: H_n -> H_{n-1}
  SectorOperator creator(int i) const { return adjoint(annihilators.at(i)); }
};

Ladder build_ladder(const FockSpace& space);
SectorOperator number_operator(const FockSpace& space);
SectorOperator free_hamiltonian(const FockSpace& space, Dispersion convention = Dispersion::many_body);

/// B_Lambda: H_n -> H~_{n-2}, n = 2..n_max. An infinite model gives B (no cutoff).
SectorOperator build_b_lambda(const FockSpace& space, const CutoffModel& model);

/// H_{I,Lambda} assembled directly from its normal-ordered quartic form.
SectorOperator build_h_interaction(const FockSpace& space, const CutoffModel& model);

/// V' from the momentum-space kernel (2 pi)^{-2} v^(p' - p) of a radial potential.
SectorOperator build_potential_term(const FockSpace& space, const Potential& potential);

/// max over sectors n <= n_max of |(-g B*B) - H_I|_max. Requires a finite cutoff.
double verify_square_root_identity(const FockSpace& space, const CutoffModel& model, double g_scale = 1.0);

/// Phi_Lambda(E) = g^{-1} - B R0(E) B* on angel sectors n <= n_max - 2.
SectorOperator build_phi(const FockSpace& space, const CutoffModel& model, double energy);

struct PhiSplit {
  SectorOperator phi0;       ///< diagonal part from the double contraction
  SectorOperator phi_i2;     ///< single-contraction part, Phi_I^(2)
  SectorOperator phi_i4;     ///< fully normal-ordered part, Phi_I^(4)
};

/// Wick-ordered pieces of Phi_Lambda(E), assembled independently of build_phi. Only sectors
/// n, n-1, n-2 are touched, so top_sector may go up to n_max (default n_max - 2).
PhiSplit build_phi_wick(const FockSpace& space, const CutoffModel& model, double energy, int top_sector = -1);

/// Phi_Lambda(E) on H~_1 restricted to total momentum P: rows and columns are particle modes i
/// with the angel at P - p_i (modes whose partner slot is missing are dropped and reported).
struct OneParticleBlock {
  Eigen::MatrixXd phi;
  std::vector<int> modes;
};
OneParticleBlock phi_one_particle_block(const FockSpace& space, const CutoffModel& model, double energy,
                                        const Eigen::Vector2i& total = Eigen::Vector2i::Zero());

/// Diagonal of Phi on H~_0 computed from pair sums alone (no particle sectors needed).
Eigen::VectorXd phi_dimer_sector(const FockGrid& grid, const CutoffModel& model, double energy,
                                 std::vector<Eigen::Vector2i>* slots = nullptr);

/// Smallest E with Phi on H~_0 at angel momentum zero vanishing (the discrete dimer).
double discrete_dimer_energy(const FockGrid& grid, const CutoffModel& model);

/// Lowest eigenvalue of H0 + H_I (+ V') on sector n.
double ground_state_energy(const FockSpace& space, const CutoffModel& model, int n,
                           const Potential* potential = nullptr);
/// Lowest eigenvalue over all sectors 0..n_max.
double lowest_energy(const FockSpace& space, const CutoffModel& model, const Potential* potential = nullptr);

// ---- identity and bound checks -------------------------------------------------------------

/// Resolvent identities tying R_Lambda, R0 and Phi on every sector n = 2..n_max (max-norm residuals).
struct BlockResolventResidual {
  double resolvent = 0;  ///< |R - R0 - R0 B* Phi^{-1} B R0|
  double phi_inverse = 0;  ///< |Phi^{-1} - g - g^2 B R B*|
  double block11 = 0;  ///< |(H~(E)^{-1})_{11} - R|
};
BlockResolventResidual verify_block_resolvent_identities(const FockSpace& space, const CutoffModel& model,
                                                         double energy);

struct PhiBoundReport {
  int particles = 0;          ///< N; Phi acts on H~_{N-2}
  double energy = 0;
  double min_eigenvalue = 0;  ///< smallest eigenvalue of Phi_Lambda(E)
  double phi_i_norm = 0;      ///< spectral norm of Phi_I = Phi - Phi_0
  double max_form_ratio = 0;  ///< max |<Psi, Phi_I Psi>| / |Psi|^2 over random Psi
  double bound = 0;           ///< 2 N^2
  int samples = 0;
  bool holds() const { return max_form_ratio <= bound && phi_i_norm <= bound; }
};
/// Requires E < -e_N (checked in log space) and N <= n_max.
PhiBoundReport verify_phi_bounds(const FockSpace& space, const CutoffModel& model, double energy, int particles,
                                 int samples, std::mt19937_64& rng, bool require_below_e_n = true);

struct NumberBoundReport {
  double constant_number = 0;   ///< C with |B psi| <= C |N0 psi|
  double constant_kinetic = 0;  ///< C with |B psi| <= C |(H0 + N0) psi|
  double max_ratio_number = 0;  ///< max |B psi| / (C |N0 psi|)
  double max_ratio_kinetic = 0;
  double max_form_ratio = 0;    ///< max |<psi,H_I psi>| / (g/(8 pi^2) C_rho^2 |N0^{1/2}(N0-1)^{1/2} psi|^2)
  int samples = 0;
};
NumberBoundReport verify_b_bounds(const FockSpace& space, const CutoffModel& model, int samples,
                                  std::mt19937_64& rng);

struct PotentialNormReport {
  int particles = 0;
  double norm = 0;   ///< spectral norm of V' on sector N
  double bound = 0;  ///< N^2 |v|_inf / 2
};
PotentialNormReport verify_potential_norm(const FockSpace& space, const Potential& potential, int particles);

struct SharpResidual {
  double resolvent = 0;      ///< |R# - R1 - R1 B* Phi#^{-1} B R1|
  double decomposition = 0;  ///< |Phi# - Phi - B R0 V' R0 B* + B R0 V' R1 V' R0 B*|
  double phi_difference = 0; ///< |Phi# - Phi|, zero for v = 0
};
SharpResidual verify_sharp_identities(const FockSpace& space, const CutoffModel& model, const Potential& potential,
                                      double energy);

// ---- randomized identity suite -------------------------------------------------------------

struct SuiteConfig {
  int instances = 20;
  int max_modes = 9;        ///< up to 16; boxes {-1,0,1}^2 (<= 9 modes) or {-2..2}^2
  int n_max = 4;
  double lambda_min = 1, lambda_max = 10;
  double mu_min = 0.1, mu_max = 2;
  double corrupt_g = 1.0;   ///< multiplies g in the square-root check (1 = honest)
  int jobs = 1;
  double sqrt_tolerance = 1e-10;
  double block_tolerance = 1e-8;
};

struct InstanceReport {
  int index = 0;
  int modes = 0;
  int n_max = 0;
  double spacing = 0, lambda = 0, mu = 0, energy = 0;
  double sqrt_residual = 0;
  BlockResolventResidual blocks;
  bool pass = false;
};

struct SuiteReport {
  std::vector<InstanceReport> instances;
  bool pass() const;
};

SuiteReport run_identity_suite(const SuiteConfig& config, std::uint64_t seed);

}  // namespace delta2d::fock
