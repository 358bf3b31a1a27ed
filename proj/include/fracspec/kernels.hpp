#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "fracspec/error.hpp"
#include "fracspec/geometry.hpp"
#include "fracspec/quadrature.hpp"
#include "fracspec/rng.hpp"

namespace fracspec {

struct KernelParams {
  double alpha = 1.0;
  int dim = 1;

  KernelParams() = default;
  KernelParams(double a, int d) : alpha(a), dim(d) {
    detail::require_domain(a > 0.0 && a <= 2.0, "alpha must lie in (0, 2]");
    detail::require_domain(d >= 1, "dimension must be at least 1");
  }
};

struct SubordinatorSample {
  std::vector<double> time_grid;
  std::vector<double> values;
};

namespace detail {

// exp(log_prefactor + exponent), routed through log space when the exponent
// would underflow or overflow on its own.
inline double scaled_exp(double prefactor, double exponent) {
  if (std::abs(exponent) > 700.0) {
    if (prefactor <= 0.0) return 0.0;
    return std::exp(std::log(prefactor) + exponent);
  }
  return prefactor * std::exp(exponent);
}

}  // namespace detail

// c_d = Gamma((d+1)/2) / pi^((d+1)/2).
inline double cauchy_constant(int d) {
  detail::require_domain(d >= 1, "dimension must be at least 1");
  const double h = 0.5 * (d + 1);
  return std::tgamma(h) / std::pow(std::numbers::pi, h);
}

// Cauchy (alpha = 1) transition density as a function of r^2 = |x - y|^2.
inline double cauchy_kernel_r2(double t, double r2, int d) {
  detail::require_domain(t > 0.0, "cauchy_kernel: t must be positive");
  return cauchy_constant(d) * t / std::pow(t * t + r2, 0.5 * (d + 1));
}

inline double cauchy_kernel(double t, const Point& x, const Point& y, int d) {
  return cauchy_kernel_r2(t, dist2(x, y), d);
}

// Brownian motion at twice the standard speed.
inline double gaussian_kernel_r2(double t, double r2, int d) {
  detail::require_domain(t > 0.0, "gaussian_kernel: t must be positive");
  return detail::scaled_exp(std::pow(4.0 * std::numbers::pi * t, -0.5 * d), -r2 / (4.0 * t));
}

inline double gaussian_kernel(double t, const Point& x, const Point& y, int d) {
  return gaussian_kernel_r2(t, dist2(x, y), d);
}

// Density of the 1/2-stable subordinator at time t.
inline double subordinator_density_half(double t, double s) {
  detail::require_domain(t > 0.0 && s > 0.0, "subordinator_density_half: t and s must be positive");
  const double pre = t / std::sqrt(4.0 * std::numbers::pi) * std::pow(s, -1.5);
  return detail::scaled_exp(pre, -t * t / (4.0 * s));
}

// P(sigma_t <= s) for the 1/2-stable subordinator.
inline double subordinator_cdf_half(double t, double s) {
  detail::require_domain(t > 0.0 && s > 0.0, "subordinator_cdf_half: t and s must be positive");
  return std::erfc(t / (2.0 * std::sqrt(s)));
}

// Gaussian kernel averaged over the 1/2-stable subordinator at time t,
// integrated in log s so that both ends of the half-line are resolved.
inline double subordinated_gaussian_half(double t, double r2, int d, double tol = 1e-13) {
  detail::require_domain(t > 0.0, "subordinated_gaussian_half: t must be positive");
  auto f = [&](double w) {
    const double s = std::exp(w);
    return s * gaussian_kernel_r2(s, r2, d) * subordinator_density_half(t, s);
  };
  // Integrand peaks near s ~ (t^2 + r2) / (2 d + 6). It decays like
  // exp(-e^{-w}) to the left and like e^{-(d+1)w/2} to the right.
  const double c = std::log((t * t + r2) / (2.0 * d + 6.0));
  return quad::adaptive(f, c - 14.0, c + 40.0, 0.0, tol).value;
}

// One increment of the beta-stable subordinator with Laplace exponent
// lambda^beta over a time step dt (Kanter's representation of the
// Chambers-Mallows-Stuck construction for positive stable laws).
inline double sample_subordinator_increment(double dt, double beta, CounterRng& rng) {
  detail::require_domain(beta > 0.0 && beta < 1.0, "beta must lie in (0, 1)");
  detail::require_domain(dt > 0.0, "dt must be positive");
  const double u = std::numbers::pi * rng.uniform();
  const double e = rng.exponential();
  if (beta == 0.5) {
    const double c = std::cos(0.5 * u);
    return dt * dt / (4.0 * e * c * c);
  }
  const double a = std::pow(std::sin(beta * u), beta / (1.0 - beta)) *
                   std::sin((1.0 - beta) * u) / std::pow(std::sin(u), 1.0 / (1.0 - beta));
  return std::pow(dt, 1.0 / beta) * std::pow(a / e, (1.0 - beta) / beta);
}

// Subordinator path sampled on an increasing time grid starting from zero.
inline SubordinatorSample sample_subordinator_path(const std::vector<double>& times, double beta,
                                                   CounterRng& rng) {
  SubordinatorSample out;
  out.time_grid = times;
  out.values.reserve(times.size());
  double prev = 0.0, acc = 0.0;
  for (double t : times) {
    detail::require_domain(t > prev, "time grid must be increasing and positive");
    acc += sample_subordinator_increment(t - prev, beta, rng);
    out.values.push_back(acc);
    prev = t;
  }
  return out;
}

}  // namespace fracspec
