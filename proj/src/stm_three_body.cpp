#include "delta2d/stm_three_body.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>

namespace delta2d {

namespace {

constexpr double pi = std::numbers::pi;
constexpr int kThetaPoints = 128;

int count_negative(const Eigen::VectorXd& ev) {
  return static_cast<int>((ev.array() < 0).count());
}

}  // namespace

Eigen::MatrixXd StmOperator::matrix() const {
  Eigen::MatrixXd m = kernel;
  m.diagonal() += diagonal;
  return m;
}

double dimer_energy_from_phi(double mu, double total_momentum) {
  if (!(mu > 0)) throw domain_error("dimer_energy_from_phi: mu must be positive");
  // log((P^2/4 - E)/mu^2) = 0  <=>  E = P^2/4 - mu^2.
  return total_momentum * total_momentum / 4.0 - mu * mu;
}

double angular_projection(double a, double b, int ell) {
  if (ell == 0) return angular_average(a, b);
  if (!(a > std::abs(b))) throw singular_kernel_error("angular_projection: requires A > |B|");
  double s = 0;
  for (int k = 0; k < kThetaPoints; ++k) {
    const double theta = 2.0 * pi * k / kThetaPoints;
    s += std::cos(ell * theta) / (a + b * std::cos(theta));
  }
  return s / kThetaPoints;
}

StmOperator build_stm_operator(double mu, double energy, const RadialGrid& grid, int ell) {
  if (!(mu > 0)) throw domain_error("build_stm_operator: mu must be positive");
  if (!(energy < 0)) throw domain_error("build_stm_operator: energy must be negative");
  if (ell < 0) throw domain_error("build_stm_operator: angular momentum must be non-negative");
  const auto n = grid.size();
  const Eigen::VectorXd& q = grid.nodes();
  StmOperator op{energy, mu, ell, grid, Eigen::VectorXd(n), Eigen::MatrixXd(n, n)};
  const Eigen::VectorXd s = grid.weights().cwiseProduct(q).cwiseSqrt();
  for (Eigen::Index i = 0; i < n; ++i) {
    op.diagonal(i) = std::log((0.75 * q(i) * q(i) - energy) / (mu * mu)) / (4.0 * pi);
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double a = q(i) * q(i) + q(j) * q(j) - energy;
      // (2 pi^2)^{-1} * 2 pi (angular measure) = 1 / pi.
      const double k = -s(i) * s(j) * angular_projection(a, q(i) * q(j), ell) / pi;
      op.kernel(i, j) = op.kernel(j, i) = k;
    }
  }
  return op;
}

Eigen::VectorXd stm_eigenvalues(const StmOperator& op) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.matrix(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw numerical_error("stm_eigenvalues: eigensolver did not converge");
  return es.eigenvalues();
}

double smallest_eigenvalue(const StmOperator& op) { return stm_eigenvalues(op)(0); }

RadialGrid build_stm_grid(double mu, const StmGridSpec& spec) {
  if (!(mu > 0)) throw domain_error("build_stm_grid: mu must be positive");
  if (spec.order < 1 || spec.nodes < spec.order || spec.nodes % spec.order != 0)
    throw grid_design_error("build_stm_grid: node count must be a positive multiple of the panel order");
  return build_radial_grid<double>(spec.q_min * mu, spec.q_max * mu, spec.nodes / spec.order, spec.order);
}

RadialGrid scale_grid(const RadialGrid& grid, double s) {
  if (!(s > 0)) throw domain_error("scale_grid: factor must be positive");
  RadialGrid out(grid.nodes() * s, grid.weights() * s, grid.map());
  out.set_domain(grid.q_min() * s, grid.q_max() * s);
  return out;
}

namespace {

GridTrimers solve_grid(double mu, std::pair<double, double> bracket, const StmSchedule& schedule, int nodes) {
  const RadialGrid grid = build_stm_grid(mu, {schedule.q_min, schedule.q_max, nodes, schedule.order});
  auto spectrum = [&](double e) { return stm_eigenvalues(build_stm_operator(mu, e, grid, schedule.ell)); };

  GridTrimers out;
  out.nodes = nodes;
  const auto [e_low, e_high] = bracket;
  const Eigen::VectorXd ev_low = spectrum(e_low);
  const Eigen::VectorXd ev_high = spectrum(e_high);
  const int n_low = count_negative(ev_low), n_high = count_negative(ev_high);
  if (n_low > 0)
    throw bracket_error("find_trimer_energies: " + std::to_string(n_low) +
                        " bound state(s) lie below the bracket; lower E_low");

  // Eigenvalue k (0-based) of Phi(E) increases as E decreases; it is negative at e_high for k < n_high.
  for (int k = 0; k < n_high; ++k) {
    double lo = e_low, hi = e_high;  // eigenvalue k > 0 at lo, < 0 at hi
    while (hi - lo > schedule.relative_tolerance * std::abs(hi)) {
      const double mid = 0.5 * (lo + hi);
      (spectrum(mid)(k) < 0 ? hi : lo) = mid;
    }
    const double root = 0.5 * (lo + hi);
    if (std::abs(root - e_low) <= schedule.relative_tolerance * std::abs(e_low) ||
        std::abs(root - e_high) <= schedule.relative_tolerance * std::abs(e_high))
      throw bracket_error("find_trimer_energies: a crossing sits on the bracket edge; widen the bracket");
    out.energies.push_back(root);
  }
  std::sort(out.energies.begin(), out.energies.end());

  for (int s = 0; s < schedule.scan_points; ++s) {
    const double t = schedule.scan_points == 1 ? 0.0 : double(s) / (schedule.scan_points - 1);
    const double e = e_low + t * (e_high - e_low);
    const Eigen::VectorXd ev = spectrum(e);
    out.scan.push_back({e, ev(0), count_negative(ev)});
  }
  return out;
}

}  // namespace

TrimerResult find_trimer_energies(double mu, std::pair<double, double> bracket, const StmSchedule& schedule) {
  if (!(mu > 0)) throw domain_error("find_trimer_energies: mu must be positive");
  const auto [e_low, e_high] = bracket;
  if (!(e_low < e_high) || !(e_high < -mu * mu))
    throw domain_error("find_trimer_energies: bracket must satisfy E_low < E_high < -mu^2");
  if (schedule.nodes.empty()) throw domain_error("find_trimer_energies: empty grid schedule");

  TrimerResult result;
  result.mu = mu;
  result.bracket = bracket;
  result.grids.resize(schedule.nodes.size());

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < schedule.nodes.size(); i = next++) {
      try {
        result.grids[i] = solve_grid(mu, bracket, schedule, schedule.nodes[i]);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int jobs = std::clamp<int>(schedule.jobs, 1, static_cast<int>(schedule.nodes.size()));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  const std::size_t count = result.grids.front().energies.size();
  for (const auto& g : result.grids)
    if (g.energies.size() != count)
      throw bracket_error("find_trimer_energies: grids disagree on the number of crossings; refine the schedule");

  const auto& finest = result.grids.back().energies;
  result.energies = finest;
  result.log_e3 = log_e_n(mu, 3);
  for (std::size_t k = 0; k < count; ++k) {
    const double e3 = finest[k];
    double estimate = e3, drift = 0;
    if (result.grids.size() >= 2) {
      const double e2 = result.grids[result.grids.size() - 2].energies[k];
      drift = std::abs(e3 - e2) / std::abs(e3);
      if (result.grids.size() >= 3) {
        const double e1 = result.grids[result.grids.size() - 3].energies[k];
        const double d1 = e2 - e1, d2 = e3 - e2;
        // Aitken delta-squared, only when the differences shrink geometrically with a common sign.
        if (d1 != 0 && d2 * d1 > 0 && std::abs(d2) < std::abs(d1)) estimate = e3 - d2 * d2 / (d2 - d1);
      }
    }
    result.extrapolated.push_back(estimate);
    result.relative_drift.push_back(drift);
    if (std::log(-e3) > result.log_e3) result.above_minus_e3 = false;
  }
  return result;
}

std::vector<double> ScaledOperator::energies(double mu) const {
  std::vector<double> e;
  for (double w : negative) e.push_back(-mu * mu * std::exp(-4.0 * pi * w));
  return e;
}

ScaledOperator scaled_operator_w(const RadialGrid& grid, int ell) {
  ScaledOperator out;
  out.w = build_stm_operator(1.0, -1.0, grid, ell).matrix();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.w, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw numerical_error("scaled_operator_w: eigensolver did not converge");
  out.eigenvalues = es.eigenvalues();
  for (Eigen::Index i = 0; i < out.eigenvalues.size(); ++i)
    if (out.eigenvalues(i) < -1e-8) out.negative.push_back(out.eigenvalues(i));
  return out;
}

double scaling_identity_residual(double mu, double energy, const RadialGrid& grid, int ell) {
  if (!(energy < 0)) throw domain_error("scaling_identity_residual: energy must be negative");
  const Eigen::MatrixXd phi = build_stm_operator(mu, energy, scale_grid(grid, std::sqrt(-energy)), ell).matrix();
  Eigen::MatrixXd rhs = build_stm_operator(1.0, -1.0, grid, ell).matrix();
  rhs.diagonal().array() += std::log(-energy / (mu * mu)) / (4.0 * pi);
  return (phi - rhs).cwiseAbs().maxCoeff();
}

}  // namespace delta2d
