#include "delta2d/potential.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace delta2d {

namespace {

constexpr int kRadialOrder = 16;
constexpr Eigen::Index kMaxRadialNodes = 400000;

struct RadialRule {
  Eigen::VectorXd r;
  Eigen::VectorXd w;
};

/// Gauss rule on [breaks.front(), breaks.back()] with panel width <= max_width.
RadialRule panel_rule(const std::vector<double>& breaks, double max_width) {
  const auto [x, w] = gauss_legendre<double>(kRadialOrder);
  std::vector<double> nodes, weights;
  for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
    const double lo = breaks[s], hi = breaks[s + 1];
    if (!(hi > lo)) continue;
    const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / max_width)));
    for (int p = 0; p < panels; ++p) {
      const double a = lo + (hi - lo) * p / panels, b = lo + (hi - lo) * (p + 1) / panels;
      for (int j = 0; j < kRadialOrder; ++j) {
        nodes.push_back(0.5 * (a + b) + 0.5 * (b - a) * x(j));
        weights.push_back(0.5 * (b - a) * w(j));
      }
    }
    if (static_cast<Eigen::Index>(nodes.size()) > kMaxRadialNodes)
      throw numerical_error("Potential: sampled profile needs too many radial nodes for this momentum grid");
  }
  RadialRule rule{Eigen::Map<Eigen::VectorXd>(nodes.data(), nodes.size()),
                  Eigen::Map<Eigen::VectorXd>(weights.data(), weights.size())};
  return rule;
}

}  // namespace

double bessel_i_scaled(int nu, double x) {
  if (x < 0) throw domain_error("bessel_i_scaled: x must be non-negative");
  if (x == 0) return nu == 0 ? 1.0 : 0.0;
  if (x <= 30.0) return std::cyl_bessel_i(static_cast<double>(nu), x) * std::exp(-x);
  // Large-argument expansion: e^{-x} I_nu(x) ~ (2 pi x)^{-1/2} sum_k (-1)^k a_k(nu) / x^k.
  const double m = 4.0 * nu * nu;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 40; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(m - odd * odd) / (8.0 * k * x);
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

Potential Potential::zero() {
  Potential p;
  p.finalize();
  return p;
}

Potential Potential::constant(double c) {
  Potential p;
  p.offset_ = c;
  p.finalize();
  return p;
}

Potential Potential::gaussians(std::vector<GaussianTerm> terms, double offset) {
  for (const auto& t : terms)
    if (!(t.width > 0) || !std::isfinite(t.amplitude))
      throw domain_error("Potential: Gaussian widths must be positive and amplitudes finite");
  Potential p;
  p.terms_ = std::move(terms);
  p.offset_ = offset;
  p.finalize();
  return p;
}

Potential Potential::from_samples(std::vector<double> radii, std::vector<double> values) {
  if (radii.empty() || radii.size() != values.size())
    throw input_format_error("Potential: need at least one (radius, value) sample");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!std::isfinite(radii[i]) || !std::isfinite(values[i]) || radii[i] < 0)
      throw input_format_error("Potential: samples must be finite with non-negative radii");
    if (i > 0 && !(radii[i] > radii[i - 1]))
      throw input_format_error("Potential: radii must be strictly increasing");
  }
  Potential p;
  p.offset_ = values.back();
  for (double& v : values) v -= p.offset_;
  if (std::any_of(values.begin(), values.end(), [](double v) { return v != 0.0; })) {
    p.radii_ = std::move(radii);
    p.values_ = std::move(values);
  }
  p.finalize();
  return p;
}

Potential Potential::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_format_error("Potential: cannot open '" + path + "'");
  std::vector<double> r, v;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    double a, b;
    if (!(ss >> a)) {
      std::string rest;
      if (std::istringstream(line) >> rest)
        throw input_format_error(path + ":" + std::to_string(lineno) + ": expected two numbers");
      continue;
    }
    std::string extra;
    if (!(ss >> b) || (ss >> extra))
      throw input_format_error(path + ":" + std::to_string(lineno) + ": expected two numbers");
    r.push_back(a);
    v.push_back(b);
  }
  if (r.empty()) throw input_format_error(path + ": no samples");
  return from_samples(std::move(r), std::move(v));
}

double Potential::profile_part(double r) const {
  if (radii_.empty() || r >= radii_.back()) return 0.0;
  if (r <= radii_.front()) return values_.front();
  const auto it = std::upper_bound(radii_.begin(), radii_.end(), r);
  const auto i = static_cast<std::size_t>(it - radii_.begin());
  const double t = (r - radii_[i - 1]) / (radii_[i] - radii_[i - 1]);
  return (1 - t) * values_[i - 1] + t * values_[i];
}

double Potential::operator()(double r) const {
  double v = offset_ + profile_part(r);
  for (const auto& t : terms_) v += t.amplitude * std::exp(-r * r / (2.0 * t.width * t.width));
  return v;
}

double Potential::support_radius() const {
  double r = radii_.empty() ? 0.0 : radii_.back();
  for (const auto& t : terms_) r = std::max(r, 40.0 * t.width);  // exp(-800) underflows relative to O(1)
  return r;
}

void Potential::finalize() {
  double s = std::abs(offset_);
  for (double v : values_) s = std::max(s, std::abs(v + offset_));
  if (!terms_.empty()) {
    double wmax = 0;
    for (const auto& t : terms_) wmax = std::max(wmax, t.width);
    const int samples = 20000;
    for (int i = 0; i <= samples; ++i) s = std::max(s, std::abs((*this)(10.0 * wmax * i / samples)));
  }
  sup_norm_ = s;
}

double Potential::hankel_kernel(int ell, double p, double q) const {
  if (ell < 0) throw domain_error("hankel_kernel: harmonic index must be non-negative");
  double k = 0;
  for (const auto& t : terms_) {
    const double s2 = t.width * t.width;
    k += t.amplitude * s2 * std::exp(-0.5 * s2 * (p - q) * (p - q)) * bessel_i_scaled(ell, s2 * p * q);
  }
  if (!radii_.empty()) {
    std::vector<double> breaks{0.0};
    breaks.insert(breaks.end(), radii_.begin(), radii_.end());
    const auto rule = panel_rule(breaks, 4.0 / std::max({p, q, 1.0}));
    for (Eigen::Index i = 0; i < rule.r.size(); ++i) {
      const double r = rule.r(i);
      const double vc = profile_part(r);
      k += rule.w(i) * r * vc * std::cyl_bessel_j(double(ell), p * r) * std::cyl_bessel_j(double(ell), q * r);
    }
  }
  return k;
}

double Potential::fourier_transform(double k) const {
  const double two_pi = 2.0 * std::numbers::pi;
  double f = 0;
  for (const auto& t : terms_) {
    const double s2 = t.width * t.width;
    f += t.amplitude * two_pi * s2 * std::exp(-0.5 * s2 * k * k);
  }
  if (!radii_.empty()) {
    std::vector<double> breaks{0.0};
    breaks.insert(breaks.end(), radii_.begin(), radii_.end());
    const auto rule = panel_rule(breaks, 4.0 / std::max(k, 1.0));
    for (Eigen::Index i = 0; i < rule.r.size(); ++i) {
      const double r = rule.r(i);
      f += two_pi * rule.w(i) * r * profile_part(r) * std::cyl_bessel_j(0.0, k * r);
    }
  }
  return f;
}

Eigen::MatrixXd Potential::channel_matrix(const RadialGrid& grid, int ell) const {
  if (ell < 0) throw domain_error("channel_matrix: harmonic index must be non-negative");
  const auto n = grid.size();
  const Eigen::VectorXd& q = grid.nodes();
  const Eigen::VectorXd scale = grid.weights().cwiseProduct(q).cwiseSqrt();
  Eigen::MatrixXd kernel = Eigen::MatrixXd::Zero(n, n);

  for (const auto& t : terms_) {
    const double s2 = t.width * t.width;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j <= i; ++j) {
        const double d = q(i) - q(j);
        const double v = t.amplitude * s2 * std::exp(-0.5 * s2 * d * d) * bessel_i_scaled(ell, s2 * q(i) * q(j));
        kernel(i, j) += v;
        if (j != i) kernel(j, i) += v;
      }
    }
  }

  if (!radii_.empty()) {
    std::vector<double> breaks{0.0};
    breaks.insert(breaks.end(), radii_.begin(), radii_.end());
    const auto rule = panel_rule(breaks, 4.0 / std::max(q(n - 1), 1.0));
    const auto nr = rule.r.size();
    Eigen::MatrixXd bessel(nr, n);
    Eigen::VectorXd weight(nr);
    for (Eigen::Index k = 0; k < nr; ++k) {
      const double r = rule.r(k);
      weight(k) = rule.w(k) * r * profile_part(r);
      for (Eigen::Index i = 0; i < n; ++i) bessel(k, i) = std::cyl_bessel_j(double(ell), q(i) * r);
    }
    kernel.noalias() += bessel.transpose() * weight.asDiagonal() * bessel;
  }

  Eigen::MatrixXd m = scale.asDiagonal() * kernel * scale.asDiagonal();
  m.diagonal().array() += offset_;
  return m;
}

}  // namespace delta2d
