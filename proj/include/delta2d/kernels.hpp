#pragma once

// Scalar special functions and the renormalized coupling shared by every module.
//
// Conventions: momenta live in R^2, integrals are over d^2p. The two-body
// relative problem uses H0 = p^2 (2m = 1); the many-body problem uses
// omega(p) = p^2 / 2 (m = 1). The Dispersion tag makes the choice explicit.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>

#include "delta2d/errors.hpp"

namespace delta2d {

template <class Scalar>
inline constexpr Scalar pi_v = std::numbers::pi_v<Scalar>;

enum class Dispersion {
  two_body,   ///< omega(p) = p^2, relative coordinate after center-of-mass reduction
  many_body,  ///< omega(p) = p^2 / 2
};

template <class Scalar>
constexpr Scalar omega(Scalar p_squared, Dispersion convention) {
  return convention == Dispersion::two_body ? p_squared : p_squared / Scalar(2);
}

inline const char* to_string(Dispersion d) {
  return d == Dispersion::two_body ? "two_body" : "many_body";
}

/// log(r^2 + 1) without overflow for huge r and without cancellation for tiny r.
template <class Scalar>
Scalar log_one_plus_square(Scalar r) {
  using std::log;
  using std::log1p;
  if (r < Scalar(1)) return log1p(r * r);
  return Scalar(2) * log(r) + log1p(Scalar(1) / (r * r));
}

/// Integral of (p^2 + a)^{-1} over |p| <= lambda minus the same with b, in closed form.
/// The divergent pi log(lambda^2) of each term cancels, so lambda = +inf is allowed.
template <class Scalar>
Scalar xi_lambda(Scalar a, Scalar b, Scalar lambda) {
  using std::log;
  if (!(a > 0) || !(b > 0) || !(lambda > 0))
    throw domain_error("xi_lambda: arguments must be positive");
  if (std::isinf(lambda)) return pi_v<Scalar> * log(b / a);
  // pi [log(lambda^2/a + 1) - log(lambda^2/b + 1)], with each log split to avoid overflow.
  return pi_v<Scalar> * (log_one_plus_square(lambda / std::sqrt(a)) -
                         log_one_plus_square(lambda / std::sqrt(b)));
}

template <class Scalar>
Scalar xi(Scalar a, Scalar b) {
  using std::log;
  if (!(a > 0) || !(b > 0)) throw domain_error("xi: arguments must be positive");
  return pi_v<Scalar> * log(b / a);
}

/// (2 pi)^2 / g_Lambda(mu) = pi log(Lambda^2 / mu^2 + 1), the regulated pair bubble.
template <class Scalar>
Scalar inverse_coupling_scaled(Scalar mu, Scalar lambda) {
  if (!(mu > 0) || !(lambda > 0)) throw domain_error("coupling: mu and lambda must be positive");
  return pi_v<Scalar> * log_one_plus_square(lambda / mu);
}

template <class Scalar>
Scalar coupling_g(Scalar mu, Scalar lambda) {
  if (std::isinf(lambda)) throw domain_error("coupling_g: the coupling vanishes at infinite cutoff");
  const Scalar four_pi_sq = Scalar(4) * pi_v<Scalar> * pi_v<Scalar>;
  return four_pi_sq / inverse_coupling_scaled(mu, lambda);
}

/// (1 / 2 pi) int_0^{2 pi} d theta / (A + B cos theta).
template <class Scalar>
Scalar angular_average(Scalar a, Scalar b) {
  using std::abs;
  using std::sqrt;
  if (!(a > abs(b))) throw singular_kernel_error("angular_average: requires A > |B|");
  // (A - B)(A + B) loses less precision than A^2 - B^2 when A ~ |B|.
  return Scalar(1) / sqrt((a - b) * (a + b));
}

/// Momentum cutoff Lambda together with the renormalization scale mu (dimer energy -mu^2).
template <class Scalar>
class BasicCutoffModel {
 public:
  static BasicCutoffModel finite(Scalar mu, Scalar lambda) {
    if (!(mu > 0)) throw domain_error("CutoffModel: mu must be positive");
    if (!(lambda > 0) || std::isinf(lambda))
      throw domain_error("CutoffModel: finite cutoff must be positive and finite");
    return BasicCutoffModel(mu, lambda);
  }

  static BasicCutoffModel infinite(Scalar mu) {
    if (!(mu > 0)) throw domain_error("CutoffModel: mu must be positive");
    return BasicCutoffModel(mu, std::numeric_limits<Scalar>::infinity());
  }

  Scalar mu() const { return mu_; }
  Scalar lambda() const { return lambda_; }
  bool is_infinite() const { return std::isinf(lambda_); }

  /// g_Lambda(mu); absent at infinite cutoff.
  std::optional<Scalar> g() const {
    if (is_infinite()) return std::nullopt;
    return coupling_g(mu_, lambda_);
  }

  /// Characteristic function of |q| <= Lambda.
  Scalar rho(Scalar q_abs) const { return q_abs <= lambda_ ? Scalar(1) : Scalar(0); }

 private:
  BasicCutoffModel(Scalar mu, Scalar lambda) : mu_(mu), lambda_(lambda) {}

  Scalar mu_;
  Scalar lambda_;
};

using CutoffModel = BasicCutoffModel<double>;

/// log e_N with e_N = max(1, mu^2 e^{16 pi N^2}); e_N itself overflows doubles for N >= 3.
inline double log_e_n(double mu, int n) {
  if (!(mu > 0)) throw domain_error("log_e_n: mu must be positive");
  return std::max(0.0, 2.0 * std::log(mu) + 16.0 * pi_v<double> * n * n);
}

/// Least-squares slope of log(y) against log(x).
template <class Scalar>
Scalar fit_loglog_slope(std::span<const Scalar> x, std::span<const Scalar> y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_loglog_slope: size mismatch");
  if (x.size() < 2) throw insufficient_data_error("fit_loglog_slope: need at least two points");
  Scalar mx = 0, my = 0;
  const auto n = static_cast<Scalar>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) throw domain_error("fit_loglog_slope: data must be positive");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  Scalar sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Scalar dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace delta2d
