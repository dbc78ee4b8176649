#pragma once

#include <stdexcept>
#include <string>

namespace delta2d {

/// Argument outside the domain of a closed-form expression (non-positive energy, bad bounds, ...).
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A resolvent was requested at (or within tolerance of) a discrete eigenvalue.
class at_eigenvalue_error : public std::runtime_error {
 public:
  at_eigenvalue_error(const std::string& what, double energy, double margin)
      : std::runtime_error(what), energy_(energy), margin_(margin) {}

  double energy() const { return energy_; }
  double margin() const { return margin_; }

 private:
  double energy_;
  double margin_;
};

/// Linear solve or eigensolve failed, or a residual check did not pass.
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what, double condition_estimate = 0.0)
      : std::runtime_error(what), condition_(condition_estimate) {}

  /// Reciprocal condition estimate of the offending matrix, 0 when not available.
  double condition_estimate() const { return condition_; }

 private:
  double condition_;
};

class singular_kernel_error : public domain_error {
 public:
  using domain_error::domain_error;
};

/// The momentum set cannot host the requested construction (missing angel slot, sector too large).
class grid_design_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operators built with different kinetic-energy conventions were combined.
class convention_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class insufficient_data_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed input file (potential profile, config).
class input_format_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A root search found a sign change at the edge of its bracket.
class bracket_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace delta2d
