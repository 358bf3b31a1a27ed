#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "fracspec/bessel.hpp"
#include "fracspec/error.hpp"
#include "fracspec/geometry.hpp"

namespace fracspec {

// Frequency of the k-th Dirichlet sine mode on the reference interval (-1, 1).
inline double sine_frequency(int k) { return 0.5 * std::numbers::pi * k; }

// Fills out[k-1] = sin(k theta) for k = 1..n by the Chebyshev recurrence.
inline void sine_table(double theta, int n, double* out) {
  if (n <= 0) return;
  const double s1 = std::sin(theta), c2 = 2.0 * std::cos(theta);
  double prev = 0.0, cur = s1;
  for (int k = 0; k < n; ++k) {
    out[k] = cur;
    const double next = c2 * cur - prev;
    prev = cur;
    cur = next;
  }
}

// sum_{k=1}^n c[k-1] sin(k theta) by Clenshaw's algorithm.
inline double clenshaw_sine(const double* c, int n, double theta) {
  const double c2 = 2.0 * std::cos(theta);
  double b1 = 0.0, b2 = 0.0;
  for (int k = n - 1; k >= 0; --k) {
    const double b0 = c[k] + c2 * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return b1 * std::sin(theta);
}

enum class BasisKind { sine, tensor_sine, disk_bessel };

inline std::string to_string(BasisKind k) {
  switch (k) {
    case BasisKind::sine: return "sine";
    case BasisKind::tensor_sine: return "tensor_sine";
    default: return "disk_bessel";
  }
}

struct DiskMode {
  int m = 0;
  int k = 1;
  bool sine = false;  // angular factor sin(m theta) instead of cos(m theta)
  double zero = 0.0;  // j_{m,k}
  double norm = 0.0;
};

// Dirichlet-Laplacian eigenfunctions of D, orthonormal in L^2(D) and
// extended by zero.
//
// Index layout: interval unions concatenate the sine modes of each
// component; rectangles use idx = (i - 1) * ny + (j - 1) for sin modes i in
// x and j in y; disks list Bessel modes by increasing j_{m,k}.
struct SpectralBasis {
  Domain domain = Domain::interval(-1, 1);
  BasisKind kind = BasisKind::sine;
  int size = 0;
  std::vector<int> offsets;  // interval unions: first index of each component, plus end
  int nx = 0, ny = 0;
  std::vector<DiskMode> disk_modes;

  int component_modes(std::size_t c) const { return offsets[c + 1] - offsets[c]; }

  // Value of basis function idx (0-based) at x.
  double eval(int idx, const Point& x) const {
    if (!domain.contains(x)) return 0.0;
    return std::visit(
        [&](const auto& s) -> double {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, IntervalUnion>) {
            const auto c = static_cast<std::size_t>(
                std::upper_bound(offsets.begin(), offsets.end(), idx) - offsets.begin() - 1);
            const Interval& iv = s.intervals[c];
            if (!iv.contains(x[0])) return 0.0;
            const int k = idx - offsets[c] + 1;
            return sine_1d(iv, k, x[0]);
          } else if constexpr (std::is_same_v<T, Rectangle>) {
            const int i = idx / ny + 1, j = idx % ny + 1;
            return sine_1d(s.x, i, x[0]) * sine_1d(s.y, j, x[1]);
          } else {
            const DiskMode& dm = disk_modes[idx];
            const double dx = x[0] - s.cx, dy = x[1] - s.cy;
            const double r = std::hypot(dx, dy), th = std::atan2(dy, dx);
            const double ang = dm.m == 0 ? 1.0 : (dm.sine ? std::sin(dm.m * th) : std::cos(dm.m * th));
            return dm.norm * bessel::J(dm.m, dm.zero * r / s.radius) * ang;
          }
        },
        domain.shape());
  }

  // Integral of basis function idx over D.
  double integral(int idx) const {
    return std::visit(
        [&](const auto& s) -> double {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, IntervalUnion>) {
            const auto c = static_cast<std::size_t>(
                std::upper_bound(offsets.begin(), offsets.end(), idx) - offsets.begin() - 1);
            return sine_integral(s.intervals[c], idx - offsets[c] + 1);
          } else if constexpr (std::is_same_v<T, Rectangle>) {
            return sine_integral(s.x, idx / ny + 1) * sine_integral(s.y, idx % ny + 1);
          } else {
            const DiskMode& dm = disk_modes[idx];
            if (dm.m != 0) return 0.0;
            // int_0^R J_0(j r / R) 2 pi r dr = 2 pi R^2 J_1(j) / j.
            return dm.norm * 2.0 * std::numbers::pi * s.radius * s.radius * bessel::J(1.0, dm.zero) /
                   dm.zero;
          }
        },
        domain.shape());
  }

  // Reflection x1 -> -x1 as a signed permutation: basis function idx maps
  // to sign * basis function partner. Only meaningful on symmetric domains.
  std::pair<int, double> reflection(int idx) const {
    return std::visit(
        [&](const auto& s) -> std::pair<int, double> {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, IntervalUnion>) {
            const auto c = static_cast<std::size_t>(
                std::upper_bound(offsets.begin(), offsets.end(), idx) - offsets.begin() - 1);
            const std::size_t mirror = s.intervals.size() - 1 - c;
            const int k = idx - offsets[c] + 1;
            return {offsets[mirror] + k - 1, k % 2 ? 1.0 : -1.0};
          } else if constexpr (std::is_same_v<T, Rectangle>) {
            const int i = idx / ny + 1;
            return {idx, i % 2 ? 1.0 : -1.0};
          } else {
            const DiskMode& dm = disk_modes[idx];
            const bool even = dm.m % 2 == 0;
            return {idx, (dm.sine ? !even : even) ? 1.0 : -1.0};
          }
        },
        domain.shape());
  }

  static double sine_1d(const Interval& iv, int k, double x) {
    if (!iv.contains(x)) return 0.0;
    const double a = iv.half_width();
    return std::sin(sine_frequency(k) * (x - iv.lo) / a) / std::sqrt(a);
  }

  static double sine_integral(const Interval& iv, int k) {
    const double a = iv.half_width();
    return k % 2 ? 2.0 * std::sqrt(a) / sine_frequency(k) : 0.0;
  }
};

namespace detail {

inline std::vector<DiskMode> lowest_disk_modes(int n, double radius) {
  std::vector<DiskMode> cand;
  // Enough orders and radial indices to contain the n lowest zeros.
  const int kmax = static_cast<int>(std::ceil(std::sqrt(double(n)))) + 2;
  const int mmax = 2 * kmax + 2;
  for (int m = 0; m <= mmax; ++m)
    for (int k = 1; k <= kmax; ++k) {
      const double j = bessel::zero(m, k);
      const double jp = bessel::J(m + 1.0, j);
      const double area = 0.5 * radius * radius * jp * jp * (m == 0 ? 2.0 : 1.0) * std::numbers::pi;
      cand.push_back({m, k, false, j, 1.0 / std::sqrt(area)});
      if (m > 0) cand.push_back({m, k, true, j, 1.0 / std::sqrt(area)});
    }
  std::stable_sort(cand.begin(), cand.end(), [](const DiskMode& a, const DiskMode& b) {
    return std::tie(a.zero, a.sine) < std::tie(b.zero, b.sine);
  });
  if (static_cast<int>(cand.size()) < n) throw UnsupportedError("disk basis too large");
  cand.resize(n);
  return cand;
}

}  // namespace detail

// Basis with n modes: n per component (split evenly) for interval unions,
// n x n tensor modes for rectangles, n lowest modes for disks.
inline SpectralBasis make_basis(const Domain& D, int n) {
  if (n < 2) throw ValidationError("basis size must be at least 2");
  SpectralBasis b;
  b.domain = D;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, IntervalUnion>) {
          b.kind = BasisKind::sine;
          const int parts = static_cast<int>(s.intervals.size());
          if (n < 2 * parts) throw ValidationError("basis size too small for the interval union");
          b.offsets.push_back(0);
          for (int c = 0; c < parts; ++c) b.offsets.push_back(b.offsets.back() + n / parts + (c < n % parts));
          b.size = n;
        } else if constexpr (std::is_same_v<T, Rectangle>) {
          b.kind = BasisKind::tensor_sine;
          b.nx = b.ny = n;
          b.size = n * n;
        } else {
          b.kind = BasisKind::disk_bessel;
          b.disk_modes = detail::lowest_disk_modes(n, s.radius);
          b.size = n;
        }
      },
      D.shape());
  return b;
}

}  // namespace fracspec
