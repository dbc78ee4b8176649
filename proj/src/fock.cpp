#include "delta2d/fock.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fock_internal.hpp"

namespace delta2d::fock {

namespace {

constexpr double pi = std::numbers::pi;

void enumerate(int modes, int n, int first, Occupation& occ, std::vector<Occupation>& out) {
  if (n == 0) {
    out.push_back(occ);
    return;
  }
  for (int i = first; i < modes; ++i) {
    ++occ[i];
    enumerate(modes, n - 1, i, occ, out);
    --occ[i];
  }
}

std::pair<int, int> key(const Eigen::Vector2i& p) { return {p.x(), p.y()}; }

}  // namespace

FockGrid FockGrid::lattice_box(int half_width, double spacing, int n_max) {
  if (half_width < 0) throw grid_design_error("lattice_box: half width must be non-negative");
  std::vector<Eigen::Vector2i> points;
  for (int x = -half_width; x <= half_width; ++x)
    for (int y = -half_width; y <= half_width; ++y) points.emplace_back(x, y);
  return from_points(std::move(points), spacing, n_max);
}

FockGrid FockGrid::from_points(std::vector<Eigen::Vector2i> points, double spacing, int n_max,
                               std::vector<double> weights) {
  if (points.empty()) throw grid_design_error("FockGrid: need at least one momentum");
  if (!(spacing > 0) || !std::isfinite(spacing)) throw grid_design_error("FockGrid: spacing must be positive");
  if (n_max < 0 || n_max > 8) throw grid_design_error("FockGrid: n_max must lie in 0..8");
  std::map<std::pair<int, int>, int> seen;
  for (const auto& p : points)
    if (!seen.emplace(key(p), 0).second) throw grid_design_error("FockGrid: momenta must be distinct");
  if (weights.empty()) weights.assign(points.size(), spacing * spacing);
  if (weights.size() != points.size()) throw grid_design_error("FockGrid: one weight per momentum");
  for (double w : weights)
    if (!(w > 0) || !std::isfinite(w)) throw grid_design_error("FockGrid: weights must be positive");
  FockGrid g;
  g.lattice = std::move(points);
  g.spacing = spacing;
  g.weights = std::move(weights);
  g.n_max = n_max;
  return g;
}

FockSpace::FockSpace(FockGrid grid) : grid_(std::move(grid)) {
  const int m = modes();
  for (int n = 0; n <= grid_.n_max; ++n) {
    std::vector<Occupation> sector;
    Occupation occ(m, 0);
    enumerate(m, n, 0, occ, sector);
    for (int s = 0; s < static_cast<int>(sector.size()); ++s) index_.emplace(sector[s], s);
    states_.push_back(std::move(sector));
  }
  for (int i = 0; i < m; ++i) particle_lookup_.emplace(key(grid_.lattice[i]), i);

  // Sumset in a deterministic (sorted) order.
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) angel_lookup_.emplace(key(grid_.lattice[i] + grid_.lattice[j]), 0);
  int k = 0;
  for (auto& [p, slot] : angel_lookup_) {
    slot = k++;
    angel_lattice_.emplace_back(p.first, p.second);
  }
  angel_weights_.assign(angel_lattice_.size(), grid_.spacing * grid_.spacing);
  pair_slot_.resize(static_cast<std::size_t>(m) * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) pair_slot_[i * m + j] = angel_lookup_.at(key(grid_.lattice[i] + grid_.lattice[j]));
}

int FockSpace::dim(int n) const {
  if (n < 0 || n > n_max()) return 0;
  return static_cast<int>(states_[n].size());
}

int FockSpace::index(const Occupation& occ) const {
  const auto it = index_.find(occ);
  return it == index_.end() ? -1 : it->second;
}

int FockSpace::angel_slot(const Eigen::Vector2i& point) const {
  const auto it = angel_lookup_.find(key(point));
  return it == angel_lookup_.end() ? -1 : it->second;
}

int FockSpace::particle_slot(const Eigen::Vector2i& point) const {
  const auto it = particle_lookup_.find(key(point));
  return it == particle_lookup_.end() ? -1 : it->second;
}

double FockSpace::kinetic(int n, int state, Dispersion convention) const {
  const auto& occ = states_.at(n).at(state);
  double e = 0;
  for (int i = 0; i < modes(); ++i)
    if (occ[i]) e += occ[i] * omega(grid_.momentum(i).squaredNorm(), convention);
  return e;
}

const Eigen::MatrixXd& SectorOperator::block(int from, int to) const {
  const auto it = blocks.find({from, to});
  if (it == blocks.end())
    throw domain_error("SectorOperator: no block " + std::to_string(from) + " -> " + std::to_string(to));
  return it->second;
}

SectorOperator adjoint(const SectorOperator& op) {
  SectorOperator t;
  t.domain = op.codomain;
  t.codomain = op.domain;
  t.dispersion = op.dispersion;
  for (const auto& [k, m] : op.blocks) t.blocks.emplace(std::make_pair(k.second, k.first), m.transpose());
  return t;
}

SectorOperator operator+(const SectorOperator& a, const SectorOperator& b) {
  if (a.dispersion && b.dispersion && *a.dispersion != *b.dispersion)
    throw convention_error(std::string("SectorOperator: cannot add ") + to_string(*a.dispersion) + " and " +
                           to_string(*b.dispersion) + " operators");
  if (a.domain != b.domain || a.codomain != b.codomain)
    throw convention_error("SectorOperator: operands act between different spaces");
  SectorOperator sum = a;
  if (!sum.dispersion) sum.dispersion = b.dispersion;
  for (const auto& [k, m] : b.blocks) {
    auto it = sum.blocks.find(k);
    if (it == sum.blocks.end()) {
      sum.blocks.emplace(k, m);
    } else {
      if (it->second.rows() != m.rows() || it->second.cols() != m.cols())
        throw domain_error("SectorOperator: block shapes differ");
      it->second += m;
    }
  }
  return sum;
}

// ---- internal per-sector assembly ------------------------------------------------------------

namespace detail {

Context::Context(const FockSpace& s, const CutoffModel* model) : space(s) {
  const int m = s.modes();
  const auto& g = s.grid();
  omega.resize(m);
  for (int i = 0; i < m; ++i) omega[i] = delta2d::omega(g.momentum(i).squaredNorm(), Dispersion::many_body);
  rho = Eigen::MatrixXd::Zero(m, m);
  beta = Eigen::MatrixXd::Zero(m, m);
  by_slot.assign(s.angel_count(), {});
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const int k = s.pair_slot(i, j);
      by_slot[k].emplace_back(i, j);
      rho(i, j) = model ? model->rho(0.5 * (g.momentum(i) - g.momentum(j)).norm()) : 1.0;
      beta(i, j) = std::sqrt(g.weights[i] * g.weights[j]) * rho(i, j) / std::sqrt(s.angel_weight(k));
    }
  }
  for (int n = 0; n <= s.n_max(); ++n) {
    Eigen::VectorXd e(s.dim(n));
    for (int t = 0; t < s.dim(n); ++t) e(t) = s.kinetic(n, t, Dispersion::many_body);
    kinetic.push_back(std::move(e));
  }
}

int annihilate2(const FockSpace& space, int n, int state, int i, int j, double& amplitude) {
  Occupation occ = space.states(n)[state];
  if (occ[j] == 0) return -1;
  amplitude = std::sqrt(double(occ[j]));
  --occ[j];
  if (occ[i] == 0) return -1;
  amplitude *= std::sqrt(double(occ[i]));
  --occ[i];
  return space.index(occ);
}

int create2(const FockSpace& space, int n, int state, int i, int j, double& amplitude) {
  Occupation occ = space.states(n)[state];
  ++occ[j];
  amplitude = std::sqrt(double(occ[j]));
  ++occ[i];
  amplitude *= std::sqrt(double(occ[i]));
  return space.index(occ);
}

int annihilate1(const FockSpace& space, int n, int state, int i, double& amplitude) {
  Occupation occ = space.states(n)[state];
  if (occ[i] == 0) return -1;
  amplitude = std::sqrt(double(occ[i]));
  --occ[i];
  return space.index(occ);
}

int create1(const FockSpace& space, int n, int state, int i, double& amplitude) {
  Occupation occ = space.states(n)[state];
  ++occ[i];
  amplitude = std::sqrt(double(occ[i]));
  return space.index(occ);
}

Eigen::MatrixXd b_block(const Context& c, int n) {
  const auto& space = c.space;
  const int dn = space.dim(n), dt = space.dim(n - 2);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(space.angel_count() * dt, dn);
  const double pref = 1.0 / (std::sqrt(2.0) * 2.0 * pi);
  const int m = space.modes();
  for (int s = 0; s < dn; ++s) {
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        double amp = 0;
        const int t = annihilate2(space, n, s, i, j, amp);
        if (t < 0) continue;
        b(space.pair_slot(i, j) * dt + t, s) += pref * c.beta(i, j) * amp;
      }
    }
  }
  return b;
}

Eigen::MatrixXd h_interaction_block(const Context& c, double g, int n) {
  const auto& space = c.space;
  const auto& w = space.grid().weights;
  const int dn = space.dim(n), m = space.modes();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dn, dn);
  if (n < 2) return h;
  const double pref = -g / (2.0 * (2.0 * pi) * (2.0 * pi));
  for (int s = 0; s < dn; ++s) {
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        double a1 = 0;
        const int t = annihilate2(space, n, s, i, j, a1);
        if (t < 0) continue;
        const int k = space.pair_slot(i, j);
        const double rho_in = c.rho(i, j);
        if (rho_in == 0.0) continue;
        for (const auto& [ip, jp] : c.by_slot[k]) {
          const double rho_out = c.rho(ip, jp);
          if (rho_out == 0.0) continue;
          double a2 = 0;
          const int sp = create2(space, n - 2, t, ip, jp, a2);
          h(sp, s) += pref * std::sqrt(w[i] * w[j] * w[ip] * w[jp]) * rho_in * rho_out / space.angel_weight(k) * a1 * a2;
        }
      }
    }
  }
  return h;
}

Eigen::MatrixXd potential_block(const FockSpace& space, const Potential& potential, int n) {
  const auto& grid = space.grid();
  const auto& w = grid.weights;
  const int dn = space.dim(n), m = space.modes();
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(dn, dn);
  if (n < 2) return v;
  // Compact part: (1/2) (2 pi)^{-2} v^(p_i' - p_i) over pairs of equal total momentum.
  Eigen::MatrixXd vhat(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b <= a; ++b)
      vhat(a, b) = vhat(b, a) = potential.fourier_transform((grid.momentum(a) - grid.momentum(b)).norm());
  std::vector<std::vector<std::pair<int, int>>> by_slot(space.angel_count());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) by_slot[space.pair_slot(i, j)].emplace_back(i, j);
  const double pref = 0.5 / ((2.0 * pi) * (2.0 * pi));
  for (int s = 0; s < dn; ++s) {
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        double a1 = 0;
        const int t = annihilate2(space, n, s, i, j, a1);
        if (t < 0) continue;
        const int k = space.pair_slot(i, j);
        for (const auto& [ip, jp] : by_slot[k]) {
          double a2 = 0;
          const int sp = create2(space, n - 2, t, ip, jp, a2);
          v(sp, s) += pref * vhat(ip, i) * std::sqrt(w[i] * w[j] * w[ip] * w[jp]) / space.angel_weight(k) * a1 * a2;
        }
      }
    }
  }
  // The value at infinity acts on every pair: offset * N (N - 1) / 2.
  v.diagonal().array() += potential.offset() * n * (n - 1) / 2.0;
  return v;
}

Eigen::MatrixXd phi_block(const Context& c, double g_inverse, double energy, int n_angel) {
  const Eigen::MatrixXd b = b_block(c, n_angel + 2);
  const Eigen::VectorXd r0 = (c.kinetic[n_angel + 2].array() - energy).inverse().matrix();
  Eigen::MatrixXd phi = -(b * r0.asDiagonal() * b.transpose());
  phi.diagonal().array() += g_inverse;
  return phi;
}

double g_inverse(const CutoffModel& model, const char* who) {
  if (model.is_infinite()) throw domain_error(std::string(who) + ": requires a finite cutoff (g = 0 at infinity)");
  return 1.0 / *model.g();
}

}  // namespace detail

// ---- public builders -------------------------------------------------------------------------

Ladder build_ladder(const FockSpace& space) {
  if (space.n_max() < 1) throw grid_design_error("build_ladder: n_max must be at least 1");
  Ladder ladder;
  const auto& w = space.grid().weights;
  for (int i = 0; i < space.modes(); ++i) {
    SectorOperator a;
    for (int n = 1; n <= space.n_max(); ++n) {
      Eigen::MatrixXd m = Eigen::MatrixXd::Zero(space.dim(n - 1), space.dim(n));
      for (int s = 0; s < space.dim(n); ++s) {
        double amp = 0;
        const int t = detail::annihilate1(space, n, s, i, amp);
        if (t >= 0) m(t, s) = amp / std::sqrt(w[i]);
      }
      a.blocks.emplace(std::make_pair(n, n - 1), std::move(m));
    }
    ladder.annihilators.push_back(std::move(a));
  }
  return ladder;
}

SectorOperator number_operator(const FockSpace& space) {
  SectorOperator op;
  for (int n = 0; n <= space.n_max(); ++n)
    op.blocks.emplace(std::make_pair(n, n), Eigen::MatrixXd::Identity(space.dim(n), space.dim(n)) * double(n));
  return op;
}

SectorOperator free_hamiltonian(const FockSpace& space, Dispersion convention) {
  SectorOperator op;
  op.dispersion = convention;
  for (int n = 0; n <= space.n_max(); ++n) {
    Eigen::VectorXd e(space.dim(n));
    for (int s = 0; s < space.dim(n); ++s) e(s) = space.kinetic(n, s, convention);
    op.blocks.emplace(std::make_pair(n, n), e.asDiagonal().toDenseMatrix());
  }
  return op;
}

SectorOperator build_b_lambda(const FockSpace& space, const CutoffModel& model) {
  if (space.n_max() < 2) throw grid_design_error("build_b_lambda: n_max must be at least 2");
  const detail::Context c(space, &model);
  SectorOperator op;
  op.codomain = Space::angel;
  for (int n = 2; n <= space.n_max(); ++n) op.blocks.emplace(std::make_pair(n, n - 2), detail::b_block(c, n));
  return op;
}

SectorOperator build_h_interaction(const FockSpace& space, const CutoffModel& model) {
  if (space.n_max() < 2) throw grid_design_error("build_h_interaction: n_max must be at least 2");
  const double g = 1.0 / detail::g_inverse(model, "build_h_interaction");
  const detail::Context c(space, &model);
  SectorOperator op;
  for (int n = 0; n <= space.n_max(); ++n)
    op.blocks.emplace(std::make_pair(n, n), detail::h_interaction_block(c, g, n));
  return op;
}

SectorOperator build_potential_term(const FockSpace& space, const Potential& potential) {
  SectorOperator op;
  for (int n = 0; n <= space.n_max(); ++n)
    op.blocks.emplace(std::make_pair(n, n), detail::potential_block(space, potential, n));
  return op;
}

double verify_square_root_identity(const FockSpace& space, const CutoffModel& model, double g_scale) {
  if (space.n_max() < 2) throw grid_design_error("verify_square_root_identity: n_max must be at least 2");
  const double g = 1.0 / detail::g_inverse(model, "verify_square_root_identity");
  const detail::Context c(space, &model);
  double residual = 0;
  for (int n = 2; n <= space.n_max(); ++n) {
    const Eigen::MatrixXd b = detail::b_block(c, n);
    const Eigen::MatrixXd lhs = -(g * g_scale) * (b.transpose() * b);
    residual = std::max(residual, (lhs - detail::h_interaction_block(c, g, n)).cwiseAbs().maxCoeff());
  }
  return residual;
}

SectorOperator build_phi(const FockSpace& space, const CutoffModel& model, double energy) {
  if (!(energy < 0)) throw domain_error("build_phi: energy must be negative");
  if (space.n_max() < 2) throw grid_design_error("build_phi: n_max must be at least 2");
  const double gi = detail::g_inverse(model, "build_phi");
  const detail::Context c(space, &model);
  SectorOperator op;
  op.domain = op.codomain = Space::angel;
  op.dispersion = Dispersion::many_body;
  for (int n = 0; n + 2 <= space.n_max(); ++n)
    op.blocks.emplace(std::make_pair(n, n), detail::phi_block(c, gi, energy, n));
  return op;
}

PhiSplit build_phi_wick(const FockSpace& space, const CutoffModel& model, double energy, int top_sector) {
  if (!(energy < 0)) throw domain_error("build_phi_wick: energy must be negative");
  if (top_sector < 0) top_sector = space.n_max() - 2;
  if (top_sector > space.n_max()) throw grid_design_error("build_phi_wick: sector beyond n_max");
  const double gi = detail::g_inverse(model, "build_phi_wick");
  const detail::Context c(space, &model);
  const int m = space.modes(), kc = space.angel_count();
  const double c0 = 1.0 / (4.0 * pi * pi), c2 = 1.0 / (2.0 * pi * pi), c4 = 1.0 / (8.0 * pi * pi);

  PhiSplit split;
  const SectorOperator empty{Space::angel, Space::angel, Dispersion::many_body, {}};
  split.phi0 = split.phi_i2 = split.phi_i4 = empty;
  for (int n = 0; n <= top_sector; ++n) {
    const int d = space.dim(n);
    Eigen::MatrixXd p0 = Eigen::MatrixXd::Zero(kc * d, kc * d);
    Eigen::MatrixXd p2 = p0, p4 = p0;
    for (int s = 0; s < d; ++s) {
      const double e0 = c.kinetic[n](s);
      // Double contraction: diagonal in angel and particle state.
      for (int k = 0; k < kc; ++k) {
        double sum = 0;
        for (const auto& [i, j] : c.by_slot[k]) sum += c.beta(i, j) * c.beta(i, j) / (e0 + c.omega[i] + c.omega[j] - energy);
        p0(k * d + s, k * d + s) = gi - c0 * sum;
      }
      // Single contraction: one particle j leaves the state, j' enters.
      for (int j = 0; j < m && n >= 1; ++j) {
        double a1 = 0;
        const int t = detail::annihilate1(space, n, s, j, a1);
        if (t < 0) continue;
        const double et = c.kinetic[n - 1](t);
        for (int jp = 0; jp < m; ++jp) {
          double a2 = 0;
          const int sp = detail::create1(space, n - 1, t, jp, a2);
          for (int i = 0; i < m; ++i) {
            const double bb = c.beta(i, j) * c.beta(i, jp);
            if (bb == 0.0) continue;
            const int k_out = space.pair_slot(i, j), k_in = space.pair_slot(i, jp);
            p2(k_out * d + sp, k_in * d + s) -=
                c2 * bb * a1 * a2 / (et + c.omega[i] + c.omega[j] + c.omega[jp] - energy);
          }
        }
      }
      // No contraction: a pair leaves, a pair enters.
      for (int i = 0; i < m && n >= 2; ++i) {
        for (int j = 0; j < m; ++j) {
          double a1 = 0;
          const int t = detail::annihilate2(space, n, s, i, j, a1);
          if (t < 0 || c.beta(i, j) == 0.0) continue;
          const double et = c.kinetic[n - 2](t);
          for (int ip = 0; ip < m; ++ip) {
            for (int jp = 0; jp < m; ++jp) {
              if (c.beta(ip, jp) == 0.0) continue;
              double a2 = 0;
              const int sp = detail::create2(space, n - 2, t, ip, jp, a2);
              p4(space.pair_slot(i, j) * d + sp, space.pair_slot(ip, jp) * d + s) -=
                  c4 * c.beta(i, j) * c.beta(ip, jp) * a1 * a2 /
                  (et + c.omega[i] + c.omega[j] + c.omega[ip] + c.omega[jp] - energy);
            }
          }
        }
      }
    }
    split.phi0.blocks.emplace(std::make_pair(n, n), std::move(p0));
    split.phi_i2.blocks.emplace(std::make_pair(n, n), std::move(p2));
    split.phi_i4.blocks.emplace(std::make_pair(n, n), std::move(p4));
  }
  return split;
}

OneParticleBlock phi_one_particle_block(const FockSpace& space, const CutoffModel& model, double energy,
                                        const Eigen::Vector2i& total) {
  if (!(energy < 0)) throw domain_error("phi_one_particle_block: energy must be negative");
  const double gi = detail::g_inverse(model, "phi_one_particle_block");
  const auto& grid = space.grid();
  const int m = space.modes();
  const double c0 = 1.0 / (4.0 * pi * pi), c2 = 1.0 / (2.0 * pi * pi);
  std::vector<double> om(m);
  for (int i = 0; i < m; ++i) om[i] = omega(grid.momentum(i).squaredNorm(), Dispersion::many_body);
  auto beta = [&](int i, int j) {
    const double rho = model.rho(0.5 * (grid.momentum(i) - grid.momentum(j)).norm());
    return std::sqrt(grid.weights[i] * grid.weights[j]) * rho / std::sqrt(space.angel_weight(space.pair_slot(i, j)));
  };

  OneParticleBlock out;
  for (int a = 0; a < m; ++a)
    if (space.angel_slot(total - grid.lattice[a]) >= 0) out.modes.push_back(a);
  const int d = static_cast<int>(out.modes.size());
  out.phi = Eigen::MatrixXd::Zero(d, d);
  for (int r = 0; r < d; ++r) {
    const int a = out.modes[r];
    const Eigen::Vector2i angel = total - grid.lattice[a];
    double sum = 0;
    for (int i = 0; i < m; ++i) {
      const int j = space.particle_slot(angel - grid.lattice[i]);
      if (j < 0) continue;
      const double bij = beta(i, j);
      sum += bij * bij / (om[a] + om[i] + om[j] - energy);
    }
    out.phi(r, r) += gi - c0 * sum;
    for (int col = 0; col < d; ++col) {
      const int b = out.modes[col];
      const int i = space.particle_slot(total - grid.lattice[a] - grid.lattice[b]);
      if (i < 0) continue;
      out.phi(r, col) -= c2 * beta(i, b) * beta(i, a) / (om[i] + om[a] + om[b] - energy);
    }
  }
  return out;
}

namespace {

/// beta_ij^2 and omega_i + omega_j for every ordered pair with p_i + p_j = K, without building sectors.
struct DimerPairs {
  std::vector<double> beta2, energy;
};

double pair_beta2(const FockGrid& grid, const CutoffModel& model, int i, int j) {
  const double rho = model.rho(0.5 * (grid.momentum(i) - grid.momentum(j)).norm());
  return grid.weights[i] * grid.weights[j] * rho * rho / (grid.spacing * grid.spacing);
}

double pair_energy(const FockGrid& grid, int i, int j) {
  return omega(grid.momentum(i).squaredNorm(), Dispersion::many_body) +
         omega(grid.momentum(j).squaredNorm(), Dispersion::many_body);
}

double dimer_phi(double gi, const DimerPairs& pairs, double energy) {
  double sum = 0;
  for (std::size_t p = 0; p < pairs.beta2.size(); ++p) sum += pairs.beta2[p] / (pairs.energy[p] - energy);
  return gi - sum / (4.0 * pi * pi);
}

}  // namespace

Eigen::VectorXd phi_dimer_sector(const FockGrid& grid, const CutoffModel& model, double energy,
                                 std::vector<Eigen::Vector2i>* slots) {
  if (!(energy < 0)) throw domain_error("phi_dimer_sector: energy must be negative");
  const double gi = detail::g_inverse(model, "phi_dimer_sector");
  std::map<std::pair<int, int>, DimerPairs> by_sum;
  for (int i = 0; i < grid.size(); ++i) {
    for (int j = 0; j < grid.size(); ++j) {
      auto& entry = by_sum[key(grid.lattice[i] + grid.lattice[j])];
      entry.beta2.push_back(pair_beta2(grid, model, i, j));
      entry.energy.push_back(pair_energy(grid, i, j));
    }
  }
  Eigen::VectorXd phi(static_cast<Eigen::Index>(by_sum.size()));
  if (slots) slots->clear();
  Eigen::Index k = 0;
  for (const auto& [p, pairs] : by_sum) {
    phi(k++) = dimer_phi(gi, pairs, energy);
    if (slots) slots->emplace_back(p.first, p.second);
  }
  return phi;
}

double discrete_dimer_energy(const FockGrid& grid, const CutoffModel& model) {
  const double gi = detail::g_inverse(model, "discrete_dimer_energy");
  std::map<std::pair<int, int>, int> lookup;
  for (int i = 0; i < grid.size(); ++i) lookup.emplace(key(grid.lattice[i]), i);
  DimerPairs pairs;
  double threshold = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid.size(); ++i) {
    const auto it = lookup.find(key(-grid.lattice[i]));
    if (it == lookup.end()) continue;
    const double b2 = pair_beta2(grid, model, i, it->second);
    if (b2 == 0.0) continue;
    pairs.beta2.push_back(b2);
    pairs.energy.push_back(pair_energy(grid, i, it->second));
    threshold = std::min(threshold, pairs.energy.back());
  }
  if (pairs.beta2.empty()) throw grid_design_error("discrete_dimer_energy: no pair with zero total momentum inside the cutoff");
  auto f = [&](double e) { return dimer_phi(gi, pairs, e); };
  // f rises from -inf at the threshold to g^{-1} > 0 as E -> -inf.
  double hi = threshold - 1e-13 * std::max(1.0, std::abs(threshold));
  double step = 1.0, lo = threshold - step;
  while (f(lo) < 0) {
    hi = lo;
    step *= 2;
    lo = threshold - step;
    if (step > 1e300) throw numerical_error("discrete_dimer_energy: no sign change");
  }
  for (int it = 0; it < 400 && hi - lo > 1e-15 * std::abs(lo); ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

double ground_state_energy(const FockSpace& space, const CutoffModel& model, int n, const Potential* potential) {
  if (n < 0 || n > space.n_max()) throw domain_error("ground_state_energy: sector out of range");
  const detail::Context c(space, &model);
  Eigen::MatrixXd h = c.kinetic[n].asDiagonal();
  if (n >= 2) h += detail::h_interaction_block(c, 1.0 / detail::g_inverse(model, "ground_state_energy"), n);
  if (potential) h += detail::potential_block(space, *potential, n);
  if (h.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw numerical_error("ground_state_energy: eigensolver failed");
  return es.eigenvalues()(0);
}

double lowest_energy(const FockSpace& space, const CutoffModel& model, const Potential* potential) {
  double e = std::numeric_limits<double>::infinity();
  for (int n = 0; n <= space.n_max(); ++n) e = std::min(e, ground_state_energy(space, model, n, potential));
  return e;
}

}  // namespace delta2d::fock
