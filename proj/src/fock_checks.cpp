#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <cmath>
#include <numbers>
#include <thread>

#include "delta2d/fock.hpp"
#include "fock_internal.hpp"

namespace delta2d::fock {

namespace {

constexpr double pi = std::numbers::pi;

Eigen::MatrixXd checked_inverse(const Eigen::MatrixXd& m, double energy, const char* what) {
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-13)) throw at_eigenvalue_error(std::string(what) + " is singular at this energy", energy, rcond);
  return lu.inverse();
}

double max_abs(const Eigen::MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

Eigen::VectorXd eigenvalues(const Eigen::MatrixXd& m) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw numerical_error("eigensolver did not converge");
  return es.eigenvalues();
}

Eigen::VectorXd random_vector(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

}  // namespace

BlockResolventResidual verify_block_resolvent_identities(const FockSpace& space, const CutoffModel& model,
                                                         double energy) {
  if (!(energy < 0)) throw domain_error("verify_block_resolvent_identities: energy must be negative");
  if (space.n_max() < 2) throw grid_design_error("verify_block_resolvent_identities: n_max must be at least 2");
  const double gi = detail::g_inverse(model, "verify_block_resolvent_identities");
  const double g = 1.0 / gi;
  const detail::Context c(space, &model);
  BlockResolventResidual out;
  for (int n = 2; n <= space.n_max(); ++n) {
    const Eigen::VectorXd shifted = c.kinetic[n].array() - energy;
    const Eigen::MatrixXd r0 = shifted.cwiseInverse().asDiagonal();
    Eigen::MatrixXd h = detail::h_interaction_block(c, g, n);
    h.diagonal() += shifted;
    const Eigen::MatrixXd r = checked_inverse(h, energy, "H_Lambda - E");
    const Eigen::MatrixXd b = detail::b_block(c, n);
    const Eigen::MatrixXd phi_inv = checked_inverse(detail::phi_block(c, gi, energy, n - 2), energy, "Phi_Lambda(E)");

    const Eigen::MatrixXd br0 = b * r0;
    out.resolvent = std::max(out.resolvent, max_abs(r - r0 - br0.transpose() * phi_inv * br0));

    Eigen::MatrixXd rhs = g * g * (b * r * b.transpose());
    rhs.diagonal().array() += g;
    out.phi_inverse = std::max(out.phi_inverse, max_abs(phi_inv - rhs));

    const Eigen::Index dp = b.cols(), da = b.rows();
    Eigen::MatrixXd ht = Eigen::MatrixXd::Zero(dp + da, dp + da);
    ht.topLeftCorner(dp, dp).diagonal() = shifted;
    ht.topRightCorner(dp, da) = b.transpose();
    ht.bottomLeftCorner(da, dp) = b;
    ht.bottomRightCorner(da, da).diagonal().setConstant(gi);
    const Eigen::MatrixXd rt = checked_inverse(ht, energy, "block operator H~(E)");
    out.block11 = std::max(out.block11, max_abs(rt.topLeftCorner(dp, dp) - r));
  }
  return out;
}

PhiBoundReport verify_phi_bounds(const FockSpace& space, const CutoffModel& model, double energy, int particles,
                                 int samples, std::mt19937_64& rng, bool require_below_e_n) {
  if (particles < 2 || particles > space.n_max())
    throw domain_error("verify_phi_bounds: particle number must lie in 2..n_max");
  if (!(energy < 0)) throw domain_error("verify_phi_bounds: energy must be negative");
  if (require_below_e_n && !(std::log(-energy) > log_e_n(model.mu(), particles)))
    throw domain_error("verify_phi_bounds: energy must lie below -e_N");
  const int na = particles - 2;
  const double gi = detail::g_inverse(model, "verify_phi_bounds");
  const detail::Context c(space, &model);
  const Eigen::MatrixXd phi = detail::phi_block(c, gi, energy, na);
  const PhiSplit split = build_phi_wick(space, model, energy, na);
  const Eigen::MatrixXd phi_i = phi - split.phi0.block(na, na);

  PhiBoundReport rep;
  rep.particles = particles;
  rep.energy = energy;
  rep.bound = 2.0 * particles * particles;
  rep.samples = samples;
  rep.min_eigenvalue = eigenvalues(phi)(0);
  const Eigen::VectorXd ev = eigenvalues(phi_i);
  rep.phi_i_norm = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  for (int s = 0; s < samples; ++s) {
    const Eigen::VectorXd psi = random_vector(phi.rows(), rng);
    rep.max_form_ratio = std::max(rep.max_form_ratio, std::abs(psi.dot(phi_i * psi)) / psi.squaredNorm());
  }
  return rep;
}

NumberBoundReport verify_b_bounds(const FockSpace& space, const CutoffModel& model, int samples,
                                  std::mt19937_64& rng) {
  if (space.n_max() < 2) throw grid_design_error("verify_b_bounds: n_max must be at least 2");
  const detail::Context c(space, &model);
  double c_rho2 = 0, c_kin2 = 0;
  for (const auto& pairs : c.by_slot) {
    double a = 0, b = 0;
    for (const auto& [i, j] : pairs) {
      a += c.beta(i, j) * c.beta(i, j);
      b += c.beta(i, j) * c.beta(i, j) / ((c.omega[i] + 1.0) * (c.omega[j] + 1.0));
    }
    c_rho2 = std::max(c_rho2, a);
    c_kin2 = std::max(c_kin2, b);
  }
  const double pref2 = 1.0 / (8.0 * pi * pi);
  NumberBoundReport rep;
  rep.constant_number = std::sqrt(pref2 * c_rho2);
  rep.constant_kinetic = std::sqrt(pref2 * c_kin2);
  rep.samples = samples;
  const std::optional<double> g = model.g();
  for (int n = 2; n <= space.n_max(); ++n) {
    const Eigen::MatrixXd b = detail::b_block(c, n);
    Eigen::MatrixXd hi;
    if (g) hi = detail::h_interaction_block(c, *g, n);
    const Eigen::ArrayXd h0n = c.kinetic[n].array() + n;
    for (int s = 0; s < samples; ++s) {
      const Eigen::VectorXd psi = random_vector(space.dim(n), rng);
      const double bpsi = (b * psi).norm();
      rep.max_ratio_number = std::max(rep.max_ratio_number, bpsi / (rep.constant_number * n * psi.norm()));
      rep.max_ratio_kinetic =
          std::max(rep.max_ratio_kinetic, bpsi / (rep.constant_kinetic * (h0n * psi.array()).matrix().norm()));
      if (g) {
        const double form = std::abs(psi.dot(hi * psi));
        const double bound = *g * pref2 * c_rho2 * n * (n - 1) * psi.squaredNorm();
        rep.max_form_ratio = std::max(rep.max_form_ratio, form / bound);
      }
    }
  }
  return rep;
}

PotentialNormReport verify_potential_norm(const FockSpace& space, const Potential& potential, int particles) {
  if (particles < 0 || particles > space.n_max()) throw domain_error("verify_potential_norm: sector out of range");
  PotentialNormReport rep;
  rep.particles = particles;
  rep.bound = particles * particles * potential.sup_norm() / 2.0;
  const Eigen::MatrixXd v = detail::potential_block(space, potential, particles);
  if (v.size() > 0) {
    const Eigen::VectorXd ev = eigenvalues(v);
    rep.norm = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  }
  return rep;
}

SharpResidual verify_sharp_identities(const FockSpace& space, const CutoffModel& model, const Potential& potential,
                                      double energy) {
  if (!(energy < 0)) throw domain_error("verify_sharp_identities: energy must be negative");
  if (space.n_max() < 2) throw grid_design_error("verify_sharp_identities: n_max must be at least 2");
  const double gi = detail::g_inverse(model, "verify_sharp_identities");
  const double g = 1.0 / gi;
  const detail::Context c(space, &model);
  SharpResidual out;
  for (int n = 2; n <= space.n_max(); ++n) {
    const Eigen::VectorXd shifted = c.kinetic[n].array() - energy;
    const Eigen::MatrixXd r0 = shifted.cwiseInverse().asDiagonal();
    const Eigen::MatrixXd v = detail::potential_block(space, potential, n);
    Eigen::MatrixXd h1 = v;
    h1.diagonal() += shifted;
    const Eigen::MatrixXd r1 = checked_inverse(h1, energy, "H0 + V' - E");
    const Eigen::MatrixXd rs = checked_inverse(h1 + detail::h_interaction_block(c, g, n), energy, "H# - E");
    const Eigen::MatrixXd b = detail::b_block(c, n);

    Eigen::MatrixXd phi_sharp = -(b * r1 * b.transpose());
    phi_sharp.diagonal().array() += gi;
    Eigen::MatrixXd phi = -(b * r0 * b.transpose());
    phi.diagonal().array() += gi;
    const Eigen::MatrixXd phi_sharp_inv = checked_inverse(phi_sharp, energy, "Phi#(E)");

    const Eigen::MatrixXd br1 = b * r1;
    out.resolvent = std::max(out.resolvent, max_abs(rs - r1 - br1.transpose() * phi_sharp_inv * br1));

    const Eigen::MatrixXd br0 = b * r0;
    const Eigen::MatrixXd first = br0 * v * br0.transpose();
    const Eigen::MatrixXd second = br0 * v * r1 * v * br0.transpose();
    out.decomposition = std::max(out.decomposition, max_abs(phi_sharp - phi - first + second));
    out.phi_difference = std::max(out.phi_difference, max_abs(phi_sharp - phi));
  }
  return out;
}

bool SuiteReport::pass() const {
  return !instances.empty() && std::all_of(instances.begin(), instances.end(), [](const auto& r) { return r.pass; });
}

namespace {

InstanceReport run_instance(const SuiteConfig& config, std::uint64_t seed, int index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Modes are drawn from {-1,0,1}^2, or from {-2..2}^2 once more than nine are allowed.
  const int max_modes = std::clamp(config.max_modes, 2, 16);
  const int half = max_modes > 9 ? 2 : 1;
  std::vector<Eigen::Vector2i> box;
  for (int x = -half; x <= half; ++x)
    for (int y = -half; y <= half; ++y) box.emplace_back(x, y);
  std::shuffle(box.begin(), box.end(), rng);
  const int modes = 2 + static_cast<int>(unit(rng) * (max_modes - 1));
  box.resize(std::min(modes, max_modes));

  InstanceReport rep;
  rep.index = index;
  rep.modes = static_cast<int>(box.size());
  rep.n_max = config.n_max;
  rep.spacing = 0.3 + 1.2 * unit(rng);
  std::vector<double> weights;
  for (std::size_t i = 0; i < box.size(); ++i) weights.push_back(rep.spacing * rep.spacing * (0.5 + unit(rng)));
  rep.lambda = config.lambda_min + (config.lambda_max - config.lambda_min) * unit(rng);
  rep.mu = config.mu_min + (config.mu_max - config.mu_min) * unit(rng);

  const FockSpace space(FockGrid::from_points(box, rep.spacing, config.n_max, weights));
  const auto model = CutoffModel::finite(rep.mu, rep.lambda);
  const double ground = lowest_energy(space, model);
  rep.energy = ground - std::max(1.0, std::abs(ground)) * (0.25 + 0.75 * unit(rng));
  rep.sqrt_residual = verify_square_root_identity(space, model, config.corrupt_g);
  rep.blocks = verify_block_resolvent_identities(space, model, rep.energy);
  rep.pass = rep.sqrt_residual <= config.sqrt_tolerance && rep.blocks.resolvent <= config.block_tolerance &&
             rep.blocks.phi_inverse <= config.block_tolerance && rep.blocks.block11 <= config.block_tolerance;
  return rep;
}

}  // namespace

SuiteReport run_identity_suite(const SuiteConfig& config, std::uint64_t seed) {
  if (config.instances < 1) throw domain_error("run_identity_suite: need at least one instance");
  if (config.n_max < 2 || config.n_max > 4) throw grid_design_error("run_identity_suite: n_max must lie in 2..4");
  SuiteReport report;
  report.instances.resize(config.instances);
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int i = next++; i < config.instances; i = next++) {
      try {
        report.instances[i] = run_instance(config, seed, i);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int jobs = std::clamp(config.jobs, 1, config.instances);
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return report;
}

}  // namespace delta2d::fock
