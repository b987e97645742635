#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "precmat/errors.hpp"
#include "precmat/symmetric_matrix.hpp"

namespace precmat {

// Scalar map behind t_rho: per eigenvalue d of the input,
//   argmin_d  -log d + (rho/2)(d - m)^2   s.t.  0 < d <= r
// which is min{ (m + sqrt(m^2 + 4/rho)) / 2, r }.
inline double t_rho_scalar(double m, double rho, double r) {
  double unconstrained = 0.5 * (m + std::sqrt(m * m + 4.0 / rho));
  return std::min(unconstrained, r);
}

// Same but with the (rho/2)||.||^2 convention replaced by rho||.||^2, and no
// spectral cap:  argmin -log d + rho (d - m)^2  =  (m + sqrt(m^2 + 2/rho))/2.
inline double t_rho_unconstrained_scalar(double m, double rho) {
  return 0.5 * (m + std::sqrt(m * m + 2.0 / rho));
}

namespace detail {

inline void check_rho_r(double rho, double r) {
  if (!(rho > 0.0) || !std::isfinite(rho))
    throw ConfigError("t_rho: need rho > 0, got " + std::to_string(rho));
  if (!(r > 0.0))  // +inf is fine, it just disables the cap
    throw ConfigError("t_rho: need r > 0, got " + std::to_string(r));
}

}  // namespace detail

// Matrix prox of -log det over { 0 < Theta, ||Theta||_2 <= r }:
//   argmin_Theta  -log det Theta + (rho/2) ||Theta - A||_F^2.
// Diagonalize A and push each eigenvalue through t_rho_scalar; the output
// shares A's eigenvectors.  Pass r = +inf for the uncapped version.
inline SymmetricMatrix t_rho(const SymmetricMatrix& a, double rho,
                             double r = std::numeric_limits<double>::infinity()) {
  detail::check_rho_r(rho, r);
  EigenDecomposition d = eigendecompose(a);
  return SymmetricMatrix(d.map_values([&](double m) { return t_rho_scalar(m, rho, r); }));
}

// argmin_Theta  -log det Theta + rho ||Theta - A||_F^2  over Theta > 0.
// Equals t_rho(a, 2*rho, +inf); also expressible in closed matrix form as
// (A + (A^2 + (2/rho) I)^{1/2}) / 2.
inline SymmetricMatrix t_rho_unconstrained(const SymmetricMatrix& a, double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho))
    throw ConfigError("t_rho_unconstrained: need rho > 0, got " + std::to_string(rho));
  EigenDecomposition d = eigendecompose(a);
  return SymmetricMatrix(
      d.map_values([&](double m) { return t_rho_unconstrained_scalar(m, rho); }));
}

}  // namespace precmat
