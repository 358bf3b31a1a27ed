#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "fracspec/bessel.hpp"
#include "fracspec/error.hpp"

namespace fracspec::bounds {

inline double bessel_zero(double p, int k) { return bessel::zero(p, k); }

struct BallEigs {
  double mu1;
  double mu2;
};

// First two Dirichlet-Laplacian eigenvalues of a ball of radius r in R^d.
inline BallEigs dirichlet_ball_eigs(int d, double r) {
  detail::require_domain(d >= 1, "dimension must be at least 1");
  detail::require_domain(r > 0.0, "radius must be positive");
  const double j1 = bessel::zero(0.5 * d - 1.0, 1);
  const double j2 = bessel::zero(0.5 * d, 1);
  return {j1 * j1 / (r * r), j2 * j2 / (r * r)};
}

// (mu^{alpha/2} / 2, mu^{alpha/2}). At alpha = 2 the upper end is mu itself.
inline std::pair<double, double> bracket_lambda(double mu, double alpha) {
  detail::require_domain(mu > 0.0, "mu must be positive");
  detail::require_domain(alpha > 0.0 && alpha <= 2.0, "alpha must lie in (0, 2]");
  const double hi = std::pow(mu, 0.5 * alpha);
  return {0.5 * hi, hi};
}

inline double gap_upper(int d, double r_D, double alpha) {
  detail::require_domain(r_D > 0.0, "inradius must be positive");
  detail::require_domain(alpha > 0.0 && alpha <= 2.0, "alpha must lie in (0, 2]");
  const double j2 = bessel::zero(0.5 * d, 1);
  const double j1 = bessel::zero(0.5 * d - 1.0, 1);
  return (std::pow(j2, alpha) - 0.5 * std::pow(j1, alpha)) / std::pow(r_D, alpha);
}

inline double C_d(int d) {
  detail::require_domain(d >= 1, "dimension must be at least 1");
  const double pi = std::numbers::pi;
  return pi * pi * (d + 1) / (2.0 * pi * d * (d + 2) + 4.0 * (d + 1));
}

inline double C_prime_d(int d) { return 4.0 * C_d(d) / (std::numbers::pi * std::numbers::pi); }

// Upper bound on lambda_1 of the unit ball for the Cauchy process.
inline double C_ball(int d) {
  detail::require_domain(d >= 1, "dimension must be at least 1");
  return std::numbers::pi * d * (d + 2) / (4.0 * (d + 1));
}

// Lower bound on lambda_* - lambda_1 for convex x1-symmetric domains, alpha = 1.
inline double gap_lower_main(int d, double L, double r_D) {
  detail::require_domain(L > 0.0 && r_D > 0.0, "L and r_D must be positive");
  return std::min(C_d(d) * r_D / (L * L), C_prime_d(d) / r_D);
}

// Bound before lambda_1 is replaced by its ball estimate.
inline double final_inequality(double lambda1, double L) {
  detail::require_domain(lambda1 > 0.0 && L > 0.0, "lambda1 and L must be positive");
  const double q = 2.0 * lambda1 + 1.0;
  return std::min(std::numbers::pi * std::numbers::pi / (4.0 * q * L * L), 1.0 / q);
}

inline double rectangle_gap_lower(double L) { return std::min(2.0 / (5.0 * L * L), 1.0 / 6.0); }

inline double disk_gap_lower(double r) {
  detail::require_domain(r > 0.0, "radius must be positive");
  return 1.0 / (6.0 * r);
}

}  // namespace fracspec::bounds
