#include "delta2d/two_body_potential.hpp"

#include <cmath>
#include <string>

namespace delta2d {

namespace {

void require_below(double energy, double bound, const char* who) {
  if (!(energy < bound))
    throw domain_error(std::string(who) + ": energy must lie below " + std::to_string(bound));
}

}  // namespace

PotentialOperator::PotentialOperator(RadialGrid grid, Potential potential, int max_ell)
    : grid_(std::move(grid)), potential_(std::move(potential)) {
  if (max_ell < 0) throw domain_error("PotentialOperator: max_ell must be non-negative");
  for (int ell = 0; ell <= max_ell; ++ell) channels_.push_back(potential_.channel_matrix(grid_, ell));
  sqrt_w_ = grid_.planar_weights().cwiseSqrt();
}

const Eigen::MatrixXd& PotentialOperator::channel(int ell) const {
  const int a = std::abs(ell);
  if (a > max_ell()) throw domain_error("PotentialOperator: harmonic " + std::to_string(ell) + " not assembled");
  return channels_[a];
}

GridFunction PotentialOperator::apply(const GridFunction& psi) const {
  return {from_coords(channel(psi.ell) * to_coords(psi.values)), psi.ell};
}

ShiftedHamiltonian::ShiftedHamiltonian(const PotentialOperator& op, double energy) : energy_(energy) {
  const Eigen::VectorXd kinetic = op.grid().nodes().array().square() - energy;
  for (int ell = 0; ell <= op.max_ell(); ++ell) {
    Eigen::MatrixXd m = op.channel(ell);
    m.diagonal() += kinetic;
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success)
      throw numerical_error("ShiftedHamiltonian: H1 - E is not positive definite at E = " + std::to_string(energy));
    const double rcond = llt.rcond();
    if (!(rcond > 1e-14)) throw numerical_error("ShiftedHamiltonian: H1 - E is ill-conditioned", rcond);
    shifted_.push_back(std::move(m));
    factors_.push_back(std::move(llt));
  }
}

Eigen::VectorXd ShiftedHamiltonian::solve(const Eigen::VectorXd& x, int ell) const {
  return factors_.at(std::abs(ell)).solve(x);
}

Eigen::VectorXd ShiftedHamiltonian::multiply(const Eigen::VectorXd& x, int ell) const {
  return shifted_.at(std::abs(ell)) * x;
}

GridFunction resolvent_r1(const PotentialOperator& op, double energy, const GridFunction& psi) {
  require_below(energy, -op.potential().sup_norm(), "resolvent_r1");
  const ShiftedHamiltonian h1(op, energy);
  const Eigen::VectorXd x = op.to_coords(psi.values);
  const Eigen::VectorXd y = h1.solve(x, psi.ell);
  const double residual = (h1.multiply(y, psi.ell) - x).norm();
  if (residual > 1e-8 * x.norm()) throw numerical_error("resolvent_r1: residual check failed");
  return {op.from_coords(y), psi.ell};
}

SharpDenominator denominator_sharp(const PotentialOperator& op, double mu, double energy) {
  require_below(energy, -op.potential().sup_norm(), "denominator_sharp");
  const double xi_term = xi(mu * mu, -energy);
  if (op.potential().is_zero()) return {xi_term, xi_term, 0.0, 0.0};
  const Eigen::VectorXd omega = op.to_coords(omega_vector(op.grid(), energy));
  const Eigen::VectorXd v_omega = op.channel(0) * omega;
  const ShiftedHamiltonian h1(op, energy);
  const double first = omega.dot(v_omega);
  const double second = v_omega.dot(h1.solve(v_omega, 0));
  return {xi_term + first - second, xi_term, first, second};
}

DressedVector dressed_vector(const PotentialOperator& op, double energy) {
  require_below(energy, -op.potential().sup_norm(), "dressed_vector");
  const Eigen::VectorXd omega = op.to_coords(omega_vector(op.grid(), energy));
  if (op.potential().is_zero()) return {{op.from_coords(omega), 0}, energy};
  const ShiftedHamiltonian h1(op, energy);
  const Eigen::VectorXd omega1 = omega - h1.solve(op.channel(0) * omega, 0);
  return {{op.from_coords(omega1), 0}, energy};
}

SharpResolvent::SharpResolvent(const PotentialOperator& op, double energy, double scalar,
                               Eigen::VectorXd vector_coords)
    : h1_(op, energy), sqrt_w_(op.grid().planar_weights().cwiseSqrt()), scalar_(scalar),
      vector_(std::move(vector_coords)) {}

GridFunction SharpResolvent::apply(const GridFunction& psi) const {
  const Eigen::VectorXd x = sqrt_w_.cwiseProduct(psi.values);
  Eigen::VectorXd y = h1_.solve(x, psi.ell);
  if (psi.ell == 0) y += scalar_ * vector_.dot(x) * vector_;
  return {y.cwiseQuotient(sqrt_w_), psi.ell};
}

SharpResolvent resolvent_sharp(const PotentialOperator& op, double mu, double energy) {
  const auto d = denominator_sharp(op, mu, energy);
  if (std::abs(d.total) < pole_tolerance)
    throw at_eigenvalue_error("resolvent_sharp: energy is a discrete eigenvalue of H#", energy, d.total);
  auto omega1 = dressed_vector(op, energy);
  return SharpResolvent(op, energy, 1.0 / d.total, op.to_coords(omega1.omega1.values));
}

SharpResolvent resolvent_sharp_cutoff(const PotentialOperator& op, const CutoffModel& model, double energy) {
  require_below(energy, -op.potential().sup_norm(), "resolvent_sharp_cutoff");
  const auto& q = op.grid().nodes();
  Eigen::VectorXd rho(q.size()), r0_rho(q.size());
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    rho(i) = model.rho(q(i));
    r0_rho(i) = rho(i) / (q(i) * q(i) - energy);
  }
  const ShiftedHamiltonian h1(op, energy);
  const Eigen::VectorXd rho_x = op.to_coords(rho);
  const Eigen::VectorXd r1_rho = h1.solve(rho_x, 0);
  const double correction = r1_rho.dot(op.channel(0) * op.to_coords(r0_rho));
  const double denom = xi_lambda(model.mu() * model.mu(), -energy, model.lambda()) + correction;
  if (std::abs(denom) < pole_tolerance)
    throw at_eigenvalue_error("resolvent_sharp_cutoff: energy is a discrete eigenvalue", energy, denom);
  return SharpResolvent(op, energy, 1.0 / denom, r1_rho);
}

double e0_bound(const Potential& potential, double mu) {
  const double v = potential.sup_norm();
  return std::max(v + 1.0, mu * mu * std::exp(v + 1.0));
}

SpectralReport find_bound_states_sharp(const PotentialOperator& op, double mu, double e_low, double e_high,
                                       const SharpRootSearch& search) {
  if (!(e_low < e_high)) throw domain_error("find_bound_states_sharp: empty energy range");
  require_below(e_high, -op.potential().sup_norm(), "find_bound_states_sharp");
  auto f = [&](double e) { return denominator_sharp(op, mu, e).total; };

  SpectralReport report;
  const int panels = std::max(1, search.scan_panels);
  double a = e_low, fa = f(a);
  for (int k = 1; k <= panels; ++k) {
    const double b = e_low + (e_high - e_low) * k / panels;
    const double fb = f(b);
    if (fa == 0.0 || (fa < 0) != (fb < 0)) {
      double lo = a, hi = b, flo = fa;
      if (fa != 0.0) {
        while (hi - lo > search.relative_tolerance * std::abs(hi)) {
          const double mid = 0.5 * (lo + hi);
          const double fm = f(mid);
          if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
          } else {
            hi = mid;
          }
        }
      } else {
        hi = lo;
      }
      const double root = 0.5 * (lo + hi);
      if (report.energies.empty() || std::abs(report.energies.back() - root) > search.relative_tolerance * std::abs(root)) {
        auto vec = dressed_vector(op, root).omega1;
        vec.values /= norm(op.grid(), vec);
        report.energies.push_back(root);
        report.eigenvectors.push_back(std::move(vec));
      }
    }
    a = b;
    fa = fb;
  }
  return report;
}

}  // namespace delta2d
