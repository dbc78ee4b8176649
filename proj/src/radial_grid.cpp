#include "delta2d/radial_grid.hpp"

namespace delta2d {

SchurBound schur_bilinear_bound_check(const RadialGrid& grid, const Eigen::VectorXd& h,
                                      const Eigen::VectorXd& h_prime, double c) {
  if (h.size() != grid.size() || h_prime.size() != grid.size())
    throw std::invalid_argument("schur_bilinear_bound_check: samples must match the grid");
  if (!(c > 0)) throw domain_error("schur_bilinear_bound_check: c must be positive");
  const auto& q = grid.nodes();
  const auto& w = grid.planar_weights();
  const Eigen::VectorXd wh = w.cwiseProduct(h);
  const Eigen::VectorXd wh2 = w.cwiseProduct(h_prime);
  double sum = 0;
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    double row = 0;
    for (Eigen::Index j = 0; j < grid.size(); ++j) row += wh2(j) / (q(i) * q(i) + q(j) * q(j) + c);
    sum += wh(i) * row;
  }
  const double norm_h = std::sqrt(w.dot(h.cwiseAbs2()));
  const double norm_h2 = std::sqrt(w.dot(h_prime.cwiseAbs2()));
  const double pi = std::numbers::pi;
  return {std::abs(sum), pi * pi * norm_h * norm_h2};
}

}  // namespace delta2d
