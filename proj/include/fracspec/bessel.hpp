#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fracspec/error.hpp"

namespace fracspec::bessel {

namespace detail {

struct Evaluation {
  double value;
  double error;  // rough absolute error estimate
};

// Ascending series, summed in extended precision. The error estimate tracks
// cancellation through the sum of absolute terms.
inline Evaluation series(double p, double x) {
  const long double h = 0.5L * x, q = p;
  const long double h2 = h * h;
  long double term = std::pow(h, q) / std::tgamma(q + 1.0L);
  long double sum = term, abs_sum = std::abs(term);
  for (int m = 1; m < 500; ++m) {
    term *= -h2 / (static_cast<long double>(m) * (m + q));
    sum += term;
    abs_sum += std::abs(term);
    if (std::abs(term) < 1e-22L * abs_sum && m > h) break;
  }
  const double eps = static_cast<double>(std::numeric_limits<long double>::epsilon());
  return {static_cast<double>(sum), 4.0 * eps * static_cast<double>(abs_sum)};
}

// Hankel asymptotic expansion, truncated at its smallest term.
inline Evaluation hankel(double p, double x) {
  const double mu = 4.0 * p * p;
  double P = 1.0, Q = 0.0, term = 1.0, last = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 200; ++k) {
    const double next = term * (mu - (2.0 * k - 1) * (2.0 * k - 1)) / (k * 8.0 * x);
    if (next == 0.0) {
      last = 0.0;
      break;
    }
    if (std::abs(next) >= std::abs(term) && k > 1) {
      last = std::abs(next);
      break;
    }
    term = next;
    // a_k / x^k enters P for even k and Q for odd k, with alternating sign.
    switch (k % 4) {
      case 1: Q += term; break;
      case 2: P -= term; break;
      case 3: Q -= term; break;
      default: P += term; break;
    }
    last = std::abs(term) * 1e-3;
    if (std::abs(term) < 1e-18) break;
  }
  const double chi = x - (0.5 * p + 0.25) * std::numbers::pi;
  const double amp = std::sqrt(2.0 / (std::numbers::pi * x));
  return {amp * (P * std::cos(chi) - Q * std::sin(chi)), amp * last + 1e-16};
}

// Miller's backward recurrence for integer order n, normalized by
// J_0 + 2 sum J_{2k} = 1. Stable for any x > 0.
inline double miller(int n, double x) {
  const double top = std::max<double>(n, x);
  int M = static_cast<int>(top + 30.0 + std::sqrt(60.0 * top));
  M += M % 2;
  double jp = 0.0, j = 1e-300, sum = 0.0, out = 0.0;
  for (int k = M; k > 0; --k) {
    const double jm = 2.0 * k / x * j - jp;
    jp = j;
    j = jm;
    if (std::abs(j) > 1e250) {
      j *= 1e-250;
      jp *= 1e-250;
      sum *= 1e-250;
      out *= 1e-250;
    }
    if (k - 1 == n) out = j;
    if ((k - 1) % 2 == 0 && k - 1 > 0) sum += 2.0 * j;
  }
  sum += j;
  return out / sum;
}

}  // namespace detail

inline constexpr double kSwitchover = 12.0;

// J_p(x) for p >= -1/2 and x >= 0.
inline double J(double p, double x) {
  if (p < -0.5) throw DomainError("bessel J: order must be >= -1/2");
  if (x < 0.0) throw DomainError("bessel J: argument must be nonnegative");
  if (x == 0.0) {
    if (p == 0.0) return 1.0;
    if (p > 0.0) return 0.0;
    return std::numeric_limits<double>::infinity();
  }
  if (x < kSwitchover) return detail::series(p, x).value;
  const auto h = detail::hankel(p, x);
  if (h.error < 1e-13) return h.value;
  // Large order relative to x: the asymptotic series is poor.
  if (p == std::floor(p)) return detail::miller(static_cast<int>(p), x);
  const auto s = detail::series(p, x);
  return s.error < h.error ? s.value : h.value;
}

// dJ_p/dx = (p/x) J_p - J_{p+1}.
inline double J_prime(double p, double x) {
  if (x == 0.0) throw DomainError("bessel J_prime: x must be positive");
  return p / x * J(p, x) - J(p + 1.0, x);
}

// McMahon's large-zero expansion, with the leading large-order form for
// the first zero when p is big.
inline double mcmahon_guess(double p, int k) {
  const double mu = 4.0 * p * p;
  const double b = (k + 0.5 * p - 0.25) * std::numbers::pi;
  const double e = 8.0 * b;
  double g = b - (mu - 1.0) / e - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * e * e * e);
  if (k == 1 && p > 2.0) {
    const double c = std::cbrt(p);
    g = p + 1.8557571 * c + 1.033150 / c;
  }
  return g;
}

// k-th positive zero of J_p. The McMahon seed starts a Newton iteration that
// is kept inside a sign-change bracket found by a coarse scan.
inline double zero(double p, int k) {
  if (p < -0.5) throw DomainError("bessel zero: order must be >= -1/2");
  if (k < 1) throw DomainError("bessel zero: index must be >= 1");

  const double step = 0.5;
  double a = std::max(0.1, p), fa = J(p, a);
  int found = 0;
  double b = a, fb = fa;
  for (int guard = 0; guard < 1000000; ++guard) {
    b = a + step;
    fb = J(p, b);
    if (fb == 0.0 || (fa < 0.0) != (fb < 0.0)) {
      if (++found == k) break;
    }
    a = b;
    fa = fb;
  }
  if (found != k) throw NumericError("bessel zero: bracket search failed");
  if (fb == 0.0) return b;

  double x = mcmahon_guess(p, k);
  if (!(x > a && x < b)) x = 0.5 * (a + b);
  for (int it = 0; it < 100; ++it) {
    const double f = J(p, x);
    if (f == 0.0) return x;
    if ((f < 0.0) == (fa < 0.0)) {
      a = x;
      fa = f;
    } else {
      b = x;
    }
    double nx = x - f / J_prime(p, x);
    if (!(nx > a && nx < b)) nx = 0.5 * (a + b);
    if (std::abs(nx - x) <= 4.0 * std::numeric_limits<double>::epsilon() * x) return nx;
    x = nx;
  }
  throw NumericError("bessel zero: Newton iteration did not converge");
}

}  // namespace fracspec::bessel
