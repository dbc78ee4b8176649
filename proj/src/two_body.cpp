#include "delta2d/two_body.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace delta2d {

namespace {

void require_negative_energy(double energy, const char* who) {
  if (!(energy < 0)) throw domain_error(std::string(who) + ": energy must be negative");
}

void require_same_grid(const RadialGrid& grid, const GridFunction& psi) {
  if (psi.values.size() != grid.size()) throw std::invalid_argument("grid function does not match the grid");
}

}  // namespace

double inner(const RadialGrid& grid, const GridFunction& u, const GridFunction& v) {
  require_same_grid(grid, u);
  require_same_grid(grid, v);
  if (u.ell != v.ell) return 0.0;
  return grid.planar_weights().dot(u.values.cwiseProduct(v.values));
}

double norm(const RadialGrid& grid, const GridFunction& u) { return std::sqrt(inner(grid, u, u)); }

double max_abs_difference(const GridFunction& u, const GridFunction& v) {
  if (u.ell != v.ell) return std::max(u.values.cwiseAbs().maxCoeff(), v.values.cwiseAbs().maxCoeff());
  return (u.values - v.values).cwiseAbs().maxCoeff();
}

GridFunction free_resolvent(const RadialGrid& grid, double energy, const GridFunction& psi) {
  require_negative_energy(energy, "free_resolvent");
  require_same_grid(grid, psi);
  const Eigen::VectorXd denom = grid.nodes().array().square() - energy;
  return {psi.values.cwiseQuotient(denom), psi.ell};
}

RankOneResolvent::RankOneResolvent(RadialGrid grid, double energy, double scalar, Eigen::VectorXd vector)
    : grid_(std::move(grid)), energy_(energy), scalar_(scalar), vector_(std::move(vector)) {
  if (vector_.size() != grid_.size()) throw std::invalid_argument("RankOneResolvent: vector does not match grid");
}

GridFunction RankOneResolvent::apply(const GridFunction& psi) const {
  GridFunction out = free_resolvent(grid_, energy_, psi);
  if (psi.ell == 0) {
    const double overlap = grid_.planar_weights().dot(vector_.cwiseProduct(psi.values));
    out.values += scalar_ * overlap * vector_;
  }
  return out;
}

SpectralCondition spectral_condition(const CutoffModel& model, double energy) {
  require_negative_energy(energy, "spectral_condition");
  const double mu2 = model.mu() * model.mu();
  const double margin = xi_lambda(mu2, -energy, model.lambda());
  return {margin != 0.0, margin};
}

RankOneResolvent resolvent_cutoff(const RadialGrid& grid, const CutoffModel& model, double energy) {
  const auto cond = spectral_condition(model, energy);
  if (std::abs(cond.margin) < pole_tolerance)
    throw at_eigenvalue_error("resolvent_cutoff: energy is a discrete eigenvalue", energy, cond.margin);
  Eigen::VectorXd vec(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const double p = grid.nodes()(i);
    vec(i) = model.rho(p) / (p * p - energy);
  }
  return RankOneResolvent(grid, energy, 1.0 / cond.margin, std::move(vec));
}

GridFunction resolvent_cutoff(const RadialGrid& grid, const CutoffModel& model, double energy,
                              const GridFunction& psi) {
  return resolvent_cutoff(grid, model, energy).apply(psi);
}

Eigen::VectorXd omega_vector(const RadialGrid& grid, double energy) {
  require_negative_energy(energy, "omega_vector");
  return (grid.nodes().array().square() - energy).inverse().matrix();
}

RankOneResolvent resolvent_exact(const RadialGrid& grid, double mu, double energy) {
  require_negative_energy(energy, "resolvent_exact");
  const double margin = xi(mu * mu, -energy);
  if (std::abs(margin) < pole_tolerance)
    throw at_eigenvalue_error("resolvent_exact: E = -mu^2 is a pole", energy, margin);
  return RankOneResolvent(grid, energy, 1.0 / margin, omega_vector(grid, energy));
}

GridFunction resolvent_exact(const RadialGrid& grid, double mu, double energy, const GridFunction& psi) {
  return resolvent_exact(grid, mu, energy).apply(psi);
}

BoundState bound_state(const RadialGrid& grid, double mu) {
  if (!(mu > 0)) throw domain_error("bound_state: mu must be positive");
  const double energy = -mu * mu;
  Eigen::VectorXd wf = omega_vector(grid, energy) / std::sqrt(omega_norm_squared(energy));
  return {energy, {std::move(wf), 0}};
}

double cutoff_bound_state_energy(const CutoffModel& model) {
  // The margin xi_Lambda(mu^2, b) is strictly increasing in b; bisect in log b.
  const double mu2 = model.mu() * model.mu();
  auto margin = [&](double log_b) { return xi_lambda(mu2, std::exp(log_b), model.lambda()); };
  double lo = std::log(mu2) - 10.0, hi = std::log(mu2) + 10.0;
  if (!(margin(lo) < 0 && margin(hi) > 0)) throw numerical_error("cutoff_bound_state_energy: no sign change");
  for (int it = 0; it < 200 && hi - lo > 0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double m = margin(mid);
    if (m == 0.0) return -std::exp(mid);
    (m < 0 ? lo : hi) = mid;
  }
  return -std::exp(0.5 * (lo + hi));
}

double aghh_alpha_from_mu(double mu) {
  if (!(mu > 0)) throw domain_error("aghh_alpha_from_mu: mu must be positive");
  const double digamma_one = -std::numbers::egamma;
  return (digamma_one + std::numbers::ln2 - std::log(mu)) / (2.0 * std::numbers::pi);
}

double aghh_mu_from_alpha(double alpha) {
  const double digamma_one = -std::numbers::egamma;
  return std::exp(-2.0 * std::numbers::pi * alpha + digamma_one + std::numbers::ln2);
}

std::vector<Probe> default_probes() {
  std::vector<Probe> probes;
  for (double width : {0.5, 1.0, 2.0}) {
    probes.push_back({"gauss_" + std::to_string(width).substr(0, 3),
                      [width](double p) { return std::exp(-p * p / (2.0 * width * width)); }, 0});
  }
  probes.push_back({"harmonic_l1", [](double p) { return p * std::exp(-p * p / 2.0); }, 1});
  return probes;
}

SpectralReport convergence_report(double mu, const std::vector<double>& energies,
                                  const std::vector<double>& lambda_schedule,
                                  const std::vector<Probe>& probes, const ConvergenceGridSpec& spec) {
  if (lambda_schedule.size() < 3)
    throw insufficient_data_error("convergence_report: schedule needs at least three cutoffs");
  if (!(mu > 0)) throw domain_error("convergence_report: mu must be positive");
  for (double e : energies) {
    require_negative_energy(e, "convergence_report");
    const double margin = xi(mu * mu, -e);
    if (std::abs(margin) < pole_tolerance)
      throw at_eigenvalue_error("convergence_report: E = -mu^2 is a pole of the limit", e, margin);
  }

  std::vector<double> breaks{spec.q_min * mu, spec.q_max * mu};
  for (double l : lambda_schedule) {
    if (!(l > spec.q_min * mu && l < spec.q_max * mu))
      throw domain_error("convergence_report: cutoff outside the grid domain");
    breaks.push_back(l);
  }
  const RadialGrid grid = build_radial_grid(breaks, spec.panels_per_segment, spec.order);

  SpectralReport report;
  report.lambda_schedule = lambda_schedule;
  for (double l : lambda_schedule)
    report.cutoff_energies.push_back(cutoff_bound_state_energy(CutoffModel::finite(mu, l)));
  const auto bs = bound_state(grid, mu);
  report.energies.push_back(bs.energy);
  report.eigenvectors.push_back(bs.wavefunction);

  for (double e : energies) {
    const auto exact = resolvent_exact(grid, mu, e);
    for (const auto& probe : probes) {
      const GridFunction psi = probe.on(grid);
      const GridFunction limit = exact.apply(psi);
      ConvergenceRow row{e, probe.name, {}, std::numeric_limits<double>::quiet_NaN()};
      bool all_positive = true;
      for (double l : lambda_schedule) {
        GridFunction diff = resolvent_cutoff(grid, CutoffModel::finite(mu, l), e, psi);
        diff.values -= limit.values;
        const double err = norm(grid, diff);
        row.errors.push_back(err);
        all_positive = all_positive && err > 0;
      }
      if (all_positive) {
        row.slope = fit_loglog_slope<double>(lambda_schedule, row.errors);
        report.rates.push_back(row.slope);
      }
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

}  // namespace delta2d
