#include "cli/commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <ostream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "delta2d/errors.hpp"
#include "delta2d/fock.hpp"
#include "delta2d/stm_three_body.hpp"
#include "delta2d/two_body.hpp"
#include "delta2d/two_body_potential.hpp"

namespace delta2d::cli {

namespace {

int resolve_jobs(int jobs) {
  if (jobs > 0) return jobs;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs f(0..n-1) on a small pool; results are stored by index, so the output order
/// never depends on completion order.
template <class F>
auto parallel_map(int n, int jobs, F f) {
  using R = decltype(f(0));
  std::vector<R> out(n);
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        out[i] = f(i);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int j = 1; j < std::clamp(jobs, 1, std::max(n, 1)); ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

double resolve_mu(const RunConfig& c) {
  const double mu = c.alpha ? aghh_mu_from_alpha(*c.alpha) : c.mu;
  if (!(mu > 0) || !std::isfinite(mu)) throw domain_error("--mu must be positive and finite");
  return mu;
}

}  // namespace

Report cmd_two_body(const RunConfig& c) {
  const double mu = resolve_mu(c);
  const std::vector<double> lambdas = c.lambdas.empty() ? std::vector<double>{25, 50, 100, 200, 400} : c.lambdas;
  for (double l : lambdas)
    if (!(l > 0)) throw domain_error("--lambdas must be positive");
  std::vector<double> energies = c.energies;
  if (energies.empty()) energies = {-2 * mu * mu, -5 * mu * mu};
  for (double e : energies)
    if (!(e < 0)) throw domain_error("--energies must be negative");

  const auto probes = default_probes();
  const auto reports = parallel_map(static_cast<int>(energies.size()), resolve_jobs(c.jobs), [&](int i) {
    return convergence_report(mu, {energies[i]}, lambdas, probes);
  });

  Report r{"two-body", {}, {}};
  r.meta = {{"mu", mu}, {"alpha", aghh_alpha_from_mu(mu)}};
  r.table("bound_state", {"mu", "alpha", "energy"}).add({mu, aghh_alpha_from_mu(mu), reports.front().energies.front()});
  auto& cutoff = r.table("cutoff", {"lambda", "g", "energy"});
  for (std::size_t k = 0; k < lambdas.size(); ++k)
    cutoff.add({lambdas[k], coupling_g(mu, lambdas[k]), reports.front().cutoff_energies[k]});
  auto& conv = r.table("convergence", {"energy", "probe", "lambda", "error"});
  auto& slopes = r.table("slopes", {"energy", "probe", "slope"});
  for (const auto& rep : reports)
    for (const auto& row : rep.rows) {
      for (std::size_t k = 0; k < lambdas.size(); ++k) conv.add({row.energy, row.probe, lambdas[k], row.errors[k]});
      slopes.add({row.energy, row.probe, row.slope});
    }
  return r;
}

Report cmd_potential(const RunConfig& c) {
  const double mu = resolve_mu(c);
  const Potential pot = c.potential.empty() ? Potential::zero() : Potential::from_file(c.potential);
  const int nodes = c.grid.empty() ? 384 : c.grid.front();
  constexpr int order = 16;
  if (nodes < order || nodes % order != 0) throw grid_design_error("--grid must be a positive multiple of 16");
  // Omega_E decays like p^-2, so a few decades above max(mu, sqrt(e0)) capture the denominator;
  // sampled profiles need radial quadrature resolving q_max * support, hence the moderate ceiling.
  const double e0_scale = std::sqrt(e0_bound(pot, mu));
  const double q_max = 1e3 * std::max({mu, 1.0, e0_scale});
  const RadialGrid grid = build_radial_grid<double>(1e-5 * std::min(mu, 1.0), q_max, nodes / order, order);
  const PotentialOperator op(grid, pot, 0);

  const double v = pot.sup_norm();
  const double e0 = e0_bound(pot, mu);
  const double e_low = c.bracket.size() == 2 ? c.bracket[0] : -e0;
  const double e_high = c.bracket.size() == 2 ? c.bracket[1] : -v - 1e-3 * std::max({mu * mu, v});
  const auto roots = find_bound_states_sharp(op, mu, e_low, e_high);

  Report r{"potential", {}, {}};
  r.meta = {{"mu", mu},           {"potential", c.potential.empty() ? std::string("zero") : c.potential},
            {"sup_norm", v},      {"e0", e0},
            {"e_low", e_low},     {"e_high", e_high},
            {"nodes", static_cast<long long>(nodes)}};
  auto& scan = r.table("scan", {"energy", "xi", "first_order", "second_order", "denominator"});
  const int points = c.scan < 0 ? 32 : c.scan;
  for (int k = 0; k < points; ++k) {
    // Log-spaced in -E so that the region near the threshold is resolved.
    const double t = points == 1 ? 0.0 : double(k) / (points - 1);
    const double e = -std::exp(std::log(-e_low) + t * (std::log(-e_high) - std::log(-e_low)));
    const auto d = denominator_sharp(op, mu, e);
    scan.add({e, d.xi, d.first_order, d.second_order, d.total});
  }
  auto& out = r.table("roots", {"index", "energy", "ratio", "e0", "inside_bounds"});
  for (std::size_t k = 0; k < roots.energies.size(); ++k) {
    const double e = roots.energies[k];
    const bool inside = e >= -e0 && e < -v;
    out.add({static_cast<long long>(k), e, e / (-mu * mu), e0, std::string(inside ? "yes" : "no")});
  }
  return r;
}

Report cmd_three_body(const RunConfig& c, bool& ok) {
  ok = true;
  const double mu = resolve_mu(c);
  StmSchedule schedule;
  if (!c.grid.empty()) schedule.nodes = c.grid;
  schedule.ell = c.ell;
  schedule.scan_points = c.scan < 0 ? 16 : c.scan;
  schedule.jobs = resolve_jobs(c.jobs);
  std::pair<double, double> bracket{-30 * mu * mu, -1.01 * mu * mu};
  if (c.bracket.size() == 2) bracket = {c.bracket[0], c.bracket[1]};

  const TrimerResult res = find_trimer_energies(mu, bracket, schedule);

  Report r{"three-body", {}, {}};
  r.meta = {{"mu", mu},
            {"ell", static_cast<long long>(c.ell)},
            {"e_low", bracket.first},
            {"e_high", bracket.second},
            {"log_e3", res.log_e3},
            {"above_minus_e3", std::string(res.above_minus_e3 ? "yes" : "no")}};
  auto& scan = r.table("scan", {"nodes", "energy", "smallest_eigenvalue", "negative_count"});
  for (const auto& g : res.grids)
    for (const auto& p : g.scan)
      scan.add({static_cast<long long>(g.nodes), p.energy, p.smallest, static_cast<long long>(p.negative_count)});
  auto& grids = r.table("grids", {"nodes", "index", "energy"});
  for (const auto& g : res.grids)
    for (std::size_t k = 0; k < g.energies.size(); ++k)
      grids.add({static_cast<long long>(g.nodes), static_cast<long long>(k), g.energies[k]});
  auto& trimers = r.table("trimers", {"index", "energy", "extrapolated", "relative_drift", "ratio", "log_minus_energy"});
  for (std::size_t k = 0; k < res.energies.size(); ++k)
    trimers.add({static_cast<long long>(k), res.energies[k], res.extrapolated[k], res.relative_drift[k],
                 res.energies[k] / (-mu * mu), std::log(-res.energies[k])});

  if (c.check_scaling) {
    StmSchedule quiet = schedule;
    quiet.scan_points = 0;
    const TrimerResult twice = find_trimer_energies(2 * mu, {4 * bracket.first, 4 * bracket.second}, quiet);
    auto& t = r.table("scaling", {"index", "energy_mu", "energy_2mu", "ratio", "relative_error"});
    if (twice.energies.size() != res.energies.size()) ok = false;
    for (std::size_t k = 0; k < std::min(twice.energies.size(), res.energies.size()); ++k) {
      const double ratio = twice.energies[k] / res.energies[k];
      const double err = std::abs(ratio - 4.0) / 4.0;
      if (!(err <= 1e-6)) ok = false;
      t.add({static_cast<long long>(k), res.energies[k], twice.energies[k], ratio, err});
    }
  }
  return r;
}

namespace {

double binomial(int n, int k) {
  double b = 1;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

}  // namespace

Report cmd_fock_check(const RunConfig& c, bool& ok) {
  if (c.modes < 2 || c.modes > 16) throw domain_error("--modes must lie in 2..16");
  if (c.n_max < 2 || c.n_max > 4) throw domain_error("--n-max must lie in 2..4");
  if (c.instances < 1) throw domain_error("--instances must be positive");
  // Largest dense block: particle sector n_max or angel sector n_max - 2 (sumset of a 3x3 or 5x5 box).
  const int angels = c.modes > 9 ? 81 : 25;
  const double worst = std::max(binomial(c.modes + c.n_max - 1, c.n_max),
                                angels * binomial(c.modes + c.n_max - 3, c.n_max - 2));
  if (worst > 6000)
    throw grid_design_error("fock-check: sector dimension " + std::to_string(static_cast<long long>(worst)) +
                            " exceeds 6000; lower --modes or --n-max");

  fock::SuiteConfig cfg;
  cfg.instances = c.instances;
  cfg.max_modes = c.modes;
  cfg.n_max = c.n_max;
  cfg.jobs = resolve_jobs(c.jobs);
  if (c.corrupt_g) cfg.corrupt_g = 1.01;
  const auto suite = fock::run_identity_suite(cfg, c.seed);
  ok = suite.pass();

  Report r{"fock-check", {}, {}};
  r.meta = {{"seed", static_cast<long long>(c.seed)},
            {"instances", static_cast<long long>(c.instances)},
            {"max_modes", static_cast<long long>(c.modes)},
            {"n_max", static_cast<long long>(c.n_max)},
            {"corrupt_g", cfg.corrupt_g},
            {"sqrt_tolerance", cfg.sqrt_tolerance},
            {"block_tolerance", cfg.block_tolerance},
            {"result", std::string(ok ? "pass" : "fail")}};
  auto& t = r.table("instances", {"index", "modes", "n_max", "spacing", "lambda", "mu", "energy", "sqrt_residual",
                                  "resolvent_residual", "phi_inverse_residual", "block11_residual", "pass"});
  for (const auto& i : suite.instances)
    t.add({static_cast<long long>(i.index), static_cast<long long>(i.modes), static_cast<long long>(i.n_max),
           i.spacing, i.lambda, i.mu, i.energy, i.sqrt_residual, i.blocks.resolvent, i.blocks.phi_inverse,
           i.blocks.block11, std::string(i.pass ? "yes" : "no")});
  return r;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Renormalized two-dimensional point interactions: two-, three- and many-body tools", "delta2d"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key = value file; explicit flags take precedence");

  RunConfig c;
  double lambda_single = 0;
  double alpha = 0;

  app.add_option("--mu", c.mu, "Dimer scale mu (bound state at -mu^2)")->check(CLI::PositiveNumber);
  auto* alpha_opt = app.add_option("--alpha", alpha, "Alternative parametrization; overrides --mu");
  auto* lambda_opt = app.add_option("--lambda", lambda_single, "Single cutoff (appended to --lambdas)");
  app.add_option("--lambdas", c.lambdas, "Cutoff schedule")->delimiter(',');
  app.add_option("--energies", c.energies, "Negative probe energies")->delimiter(',');
  app.add_option("--grid", c.grid, "Node counts (three-body schedule, potential grid size)")->delimiter(',');
  app.add_option("--bracket", c.bracket, "Energy window E_low,E_high")->delimiter(',')->expected(2);
  app.add_option("--potential", c.potential, "Radial potential file: two columns, radius and value");
  app.add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", c.out, "Output path (written atomically); stdout when absent");
  app.add_option("--seed", c.seed, "Random seed");
  app.add_option("--jobs", c.jobs, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  app.add_option("--scan", c.scan, "Points in the scan table")->check(CLI::NonNegativeNumber);
  app.add_option("--ell", c.ell, "Angular momentum channel")->check(CLI::NonNegativeNumber);
  app.add_flag("--check-scaling", c.check_scaling, "Re-run at 2 mu and check E(2 mu) = 4 E(mu)");
  app.add_flag("--corrupt-g", c.corrupt_g, "Perturb the coupling to demonstrate failure detection");
  app.add_option("--instances", c.instances, "Randomized instances");
  app.add_option("--modes", c.modes, "Maximum momentum modes per instance (<= 16)");
  app.add_option("--n-max", c.n_max, "Top particle sector (<= 4)");

  auto* two = app.add_subcommand("two-body", "Bound state, cutoff family and resolvent convergence");
  auto* pot = app.add_subcommand("potential", "Point interaction plus a bounded radial potential");
  auto* three = app.add_subcommand("three-body", "Three-boson bound states");
  auto* fockc = app.add_subcommand("fock-check", "Randomized discrete identity suite");
  for (auto* s : {two, pot, three, fockc}) s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_usage;
  }
  if (alpha_opt->count() > 0) c.alpha = alpha;
  if (lambda_opt->count() > 0) c.lambdas.push_back(lambda_single);

  try {
    const Format format = parse_format(c.format);
    bool ok = true;
    Report report;
    if (two->parsed()) report = cmd_two_body(c);
    else if (pot->parsed()) report = cmd_potential(c);
    else if (three->parsed()) report = cmd_three_body(c, ok);
    else report = cmd_fock_check(c, ok);

    const std::string text = render(report, format);
    if (c.out.empty()) out << text;
    else write_atomic(c.out, text);
    if (!ok) {
      err << "delta2d " << report.command << ": check failed\n";
      return exit_failure;
    }
    return exit_ok;
  } catch (const bracket_error& e) {
    err << "error: " << e.what() << "\n"
        << "hint: pass --bracket E_low,E_high with E_low further below and E_high just under -mu^2\n";
    return exit_failure;
  } catch (const at_eigenvalue_error& e) {
    err << "error: " << e.what() << "\n";
    return exit_failure;
  } catch (const numerical_error& e) {
    err << "error: " << e.what() << "\n";
    return exit_failure;
  } catch (const std::invalid_argument& e) {  // malformed input, oversized grids, too few cutoffs
    err << "usage error: " << e.what() << "\n";
    return exit_usage;
  } catch (const domain_error& e) {
    err << "usage error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_failure;
  }
}

}  // namespace delta2d::cli
