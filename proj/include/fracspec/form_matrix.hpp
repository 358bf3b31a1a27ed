#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>
#include <vector>

#include "fracspec/basis.hpp"
#include "fracspec/error.hpp"
#include "fracspec/parallel.hpp"
#include "fracspec/quadrature.hpp"

namespace fracspec {

// Quadrature profile for the form entries.
struct FormOptions {
  double xi_max = 1.0e4;       // Fourier cutoff; rounded up to a multiple of pi
  int points_per_panel = 10;   // Gauss-Legendre points per pi/2 panel in xi
  double sigma_lo = 1e-7;      // heat-time window is [sigma_lo / w_max^2, sigma_hi]
  double sigma_hi = 1e6;
  double log_panel = 0.5;      // panel length in log(sigma)
  int log_points = 8;
};

namespace detail {

inline void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("alpha must lie in (0, 2]");
}

// Real-valued Fourier factor of the k-th reference sine mode, written so
// that the removable singularity at xi = w_k cancels exactly:
//   odd k:  2 w cos(xi) / (w^2 - xi^2)
//   even k: 2 w sin(xi) / (w^2 - xi^2)   (times i)
inline double sine_fourier(int k, double xi) {
  const double w = sine_frequency(k);
  const double sign = k % 2 ? ((k / 2) % 2 ? -1.0 : 1.0) : ((k / 2) % 2 ? 1.0 : -1.0);
  const double d = w - xi;
  const double sinc = std::abs(d) < 1e-8 ? 1.0 - d * d / 6.0 : std::sin(d) / d;
  return 2.0 * w * sign * sinc / (w + xi);
}

inline std::vector<double> fourier_breaks(double xi_max) {
  const double h = 0.5 * std::numbers::pi;
  const int panels = static_cast<int>(std::ceil(xi_max / h - 1e-9));
  std::vector<double> br{0.0};
  for (int g = 24; g >= 1; --g) br.push_back(h * std::ldexp(1.0, -g));
  for (int p = 1; p <= panels + (panels % 2); ++p) br.push_back(h * p);
  return br;
}

// Analytic remainder of (4 w_j w_k / pi) int_X^inf xi^alpha T(xi) /
// ((xi^2 - a)(xi^2 - b)) dxi with T = (1 +- cos 2 xi) / 2 and X a multiple
// of pi.
inline double fourier_tail(double alpha, int j, int k, double X) {
  const double a = sine_frequency(j) * sine_frequency(j), b = sine_frequency(k) * sine_frequency(k);
  const double u = 1.0 / (X * X);
  double smooth = 0.0, cm = 1.0, apow = 1.0, bpow = 1.0, upow = 1.0;
  for (int m = 0; m < 40; ++m) {
    if (m > 0) {
      apow *= a;
      bpow *= b;
      // c_m = sum_{p=0}^m a^p b^{m-p}, updated as c_m = b c_{m-1} + a^m.
      cm = b * cm + apow;
      upow *= u;
    }
    const double term = cm * upow * std::pow(X, alpha - 3.0) / (3.0 + 2.0 * m - alpha);
    smooth += term;
    if (std::abs(term) < 1e-18 * std::abs(smooth)) break;
  }
  // Leading integration-by-parts term of the oscillatory part.
  const double osc = (4.0 - alpha) * std::pow(X, alpha - 5.0) / 8.0;
  const double sign = j % 2 ? 1.0 : -1.0;
  return 4.0 * sine_frequency(j) * sine_frequency(k) / std::numbers::pi * (0.5 * smooth + sign * osc);
}

}  // namespace detail

// Form matrix of the reference interval (-1, 1) for the first n sine modes,
// A_jk = (1/2pi) int |xi|^alpha F b_j conj(F b_k) dxi, by composite
// Gauss-Legendre in xi with an analytic tail. Modes of opposite parity
// decouple.
inline Eigen::MatrixXd reference_form_fourier(double alpha, int n, const FormOptions& opt = {}) {
  detail::check_alpha(alpha);
  if (n < 1) throw ValidationError("basis size must be positive");
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  if (alpha == 2.0) {
    for (int k = 1; k <= n; ++k) A(k - 1, k - 1) = sine_frequency(k) * sine_frequency(k);
    return A;
  }
  const auto br = detail::fourier_breaks(opt.xi_max);
  const double X = br.back();
  const auto nodes = quad::composite(br, opt.points_per_panel);
  const int M = static_cast<int>(nodes.size());
  constexpr int chunk = 2048;
  const int chunks = (M + chunk - 1) / chunk;

  for (int parity = 1; parity >= 0; --parity) {
    std::vector<int> ks;
    for (int k = 1; k <= n; ++k)
      if (k % 2 == parity) ks.push_back(k);
    const int np = static_cast<int>(ks.size());
    if (np == 0) continue;
    std::vector<Eigen::MatrixXd> partial(chunks);
    parallel_for(chunks, [&](std::size_t c) {
      const int lo = static_cast<int>(c) * chunk, hi = std::min(M, lo + chunk);
      Eigen::MatrixXd F(hi - lo, np), WF(hi - lo, np);
      for (int r = lo; r < hi; ++r) {
        const double xi = nodes.x[r];
        const double wt = nodes.w[r] * std::pow(xi, alpha) / std::numbers::pi;
        for (int q = 0; q < np; ++q) {
          const double f = detail::sine_fourier(ks[q], xi);
          F(r - lo, q) = f;
          WF(r - lo, q) = wt * f;
        }
      }
      partial[c] = F.transpose() * WF;
    });
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(np, np);
    for (const auto& P : partial) B += P;
    for (int p = 0; p < np; ++p)
      for (int q = 0; q < np; ++q) {
        const double v = 0.5 * (B(p, q) + B(q, p)) + detail::fourier_tail(alpha, ks[p], ks[q], X);
        A(ks[p] - 1, ks[q] - 1) = v;
      }
  }
  return A;
}

namespace detail {

struct FormKey {
  double alpha;
  int n;
  double xi_max;
  int ppp;
  bool operator<(const FormKey& o) const {
    return std::tie(alpha, n, xi_max, ppp) < std::tie(o.alpha, o.n, o.xi_max, o.ppp);
  }
};

}  // namespace detail

// Cached variant of reference_form_fourier.
inline const Eigen::MatrixXd& reference_form(double alpha, int n, const FormOptions& opt = {}) {
  static std::mutex mu;
  static std::map<detail::FormKey, Eigen::MatrixXd> cache;
  const detail::FormKey key{alpha, n, opt.xi_max, opt.points_per_panel};
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  Eigen::MatrixXd A = reference_form_fourier(alpha, n, opt);
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(key, std::move(A)).first->second;
}

// E(s) = I - <b_j, g_s * b_k> on the reference interval, where g_s is the
// heat kernel (4 pi s)^{-1/2} exp(-z^2 / 4s). Computed in real space from
// the correlation of the sine modes.
inline Eigen::MatrixXd reference_heat_defect(double s, int n) {
  if (!(s > 0.0)) throw DomainError("heat time must be positive");
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(n, n);
  const double zmax = std::min(2.0, 16.0 * std::sqrt(s));
  const double wmax = sine_frequency(n);
  const int panels = std::max(8, static_cast<int>(std::ceil(zmax * wmax / (2.0 * std::numbers::pi))));
  const auto nodes = quad::composite(quad::uniform_breaks(0.0, zmax, panels), 12);
  std::vector<double> S(n), w(n);
  for (int k = 0; k < n; ++k) w[k] = sine_frequency(k + 1);
  const double norm = 1.0 / std::sqrt(4.0 * std::numbers::pi * s);
  for (std::size_t q = 0; q < nodes.size(); ++q) {
    const double z = nodes.x[q];
    const double g = nodes.w[q] * norm * std::exp(-z * z / (4.0 * s));
    if (g == 0.0) continue;
    sine_table(0.5 * std::numbers::pi * z, n, S.data());
    for (int j = 0; j < n; ++j) {
      // 2 - (2 - z) cos(wz) - sin(wz)/w, with 2 - 2cos written as 4 sin^2.
      const double h = std::sin(0.5 * w[j] * z);
      E(j, j) += g * (4.0 * h * h + z * std::cos(w[j] * z) - S[j] / w[j]);
      for (int k = j + 2; k < n; k += 2) {
        const double d = (S[j] - S[k]) / (w[j] - w[k]) - (S[j] + S[k]) / (w[j] + w[k]);
        E(j, k) += g * d;
      }
    }
  }
  const double tail = std::erfc(1.0 / std::sqrt(s));
  for (int j = 0; j < n; ++j) {
    E(j, j) += tail;
    for (int k = j + 2; k < n; k += 2) E(k, j) = E(j, k);
  }
  return E;
}

namespace detail {

// Nodes in log(sigma) on [log lo, log hi].
inline quad::Nodes log_nodes(double lo, double hi, const FormOptions& opt) {
  const double a = std::log(lo), b = std::log(hi);
  const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / opt.log_panel)));
  return quad::composite(quad::uniform_breaks(a, b, panels), opt.log_points);
}

inline Eigen::VectorXd sine_means(int n) {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(n);
  for (int k = 1; k <= n; k += 2) m[k - 1] = 2.0 / sine_frequency(k);
  return m;
}

}  // namespace detail

// Independent route to the reference form through
// |xi|^alpha = beta / Gamma(1 - beta) int (1 - e^{-s xi^2}) s^{-1-beta} ds.
inline Eigen::MatrixXd reference_form_heat(double alpha, int n, const FormOptions& opt = {}) {
  detail::check_alpha(alpha);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  const double beta = 0.5 * alpha;
  if (alpha == 2.0) {
    for (int k = 1; k <= n; ++k) A(k - 1, k - 1) = sine_frequency(k) * sine_frequency(k);
    return A;
  }
  const double cb = beta / std::tgamma(1.0 - beta);
  const double wmax = sine_frequency(n);
  const double lo = 1e-18 / (wmax * wmax), hi = opt.sigma_hi;
  const auto nodes = detail::log_nodes(lo, hi, opt);
  for (std::size_t q = 0; q < nodes.size(); ++q) {
    const double s = std::exp(nodes.x[q]);
    A += nodes.w[q] * std::pow(s, -beta) * reference_heat_defect(s, n);
  }
  for (int k = 1; k <= n; ++k)
    A(k - 1, k - 1) += std::pow(lo, 1.0 - beta) / (1.0 - beta) * sine_frequency(k) * sine_frequency(k);
  const Eigen::VectorXd m = detail::sine_means(n);
  A += (std::pow(hi, -beta) / beta) * Eigen::MatrixXd::Identity(n, n);
  A -= (std::pow(hi, -beta - 0.5) / (beta + 0.5) / std::sqrt(4.0 * std::numbers::pi)) * (m * m.transpose());
  return cb * A;
}

namespace detail {

// Form matrix on a union of disjoint intervals. Diagonal blocks are scaled
// reference matrices; off-diagonal blocks are
// -C_{1,alpha} int int b_j(x) b_k(y) |x - y|^{-1-alpha} dx dy.
inline Eigen::MatrixXd union_form(const SpectralBasis& basis, const IntervalUnion& U, double alpha,
                                  const FormOptions& opt) {
  const int N = basis.size;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
  const std::size_t parts = U.intervals.size();
  for (std::size_t c = 0; c < parts; ++c) {
    const int nc = basis.component_modes(c);
    const double a = U.intervals[c].half_width();
    A.block(basis.offsets[c], basis.offsets[c], nc, nc) = std::pow(a, -alpha) * reference_form(alpha, nc, opt);
  }
  if (alpha == 2.0 || parts < 2) return A;

  const double C = std::pow(2.0, alpha) * std::tgamma(0.5 * (1.0 + alpha)) /
                   (std::sqrt(std::numbers::pi) * std::abs(std::tgamma(-0.5 * alpha)));
  auto sample = [&](std::size_t c, double focus, double gap) {
    const Interval& iv = U.intervals[c];
    const int nc = basis.component_modes(c);
    const double coarse = 4.0 * iv.half_width() / std::max(nc, 4);
    const auto nodes = quad::composite(quad::graded_breaks(iv.lo, iv.hi, {focus}, 0.25 * gap, coarse), 12);
    Eigen::MatrixXd B(nodes.size(), nc);
    for (std::size_t r = 0; r < nodes.size(); ++r) {
      std::vector<double> s(nc);
      sine_table(sine_frequency(1) * (nodes.x[r] - iv.lo) / iv.half_width(), nc, s.data());
      for (int k = 0; k < nc; ++k) B(r, k) = s[k] / std::sqrt(iv.half_width());
    }
    return std::make_pair(nodes, B);
  };
  for (std::size_t c = 0; c < parts; ++c)
    for (std::size_t e = c + 1; e < parts; ++e) {
      const Interval &I = U.intervals[c], &J = U.intervals[e];
      const double gap = J.lo - I.hi;
      auto [nx, Bx] = sample(c, I.hi, gap);
      auto [ny, By] = sample(e, J.lo, gap);
      Eigen::MatrixXd K(nx.size(), ny.size());
      for (std::size_t p = 0; p < nx.size(); ++p)
        for (std::size_t q = 0; q < ny.size(); ++q)
          K(p, q) = nx.w[p] * ny.w[q] * std::pow(ny.x[q] - nx.x[p], -1.0 - alpha);
      const Eigen::MatrixXd blk = -C * (Bx.transpose() * K * By);
      A.block(basis.offsets[c], basis.offsets[e], blk.rows(), blk.cols()) = blk;
      A.block(basis.offsets[e], basis.offsets[c], blk.cols(), blk.rows()) = blk.transpose();
    }
  return A;
}

// Form matrix of the tensor sine basis on a rectangle with half-widths
// (ax, ay):
//   A = Ax (x) I + I (x) Ay - c_beta ay^{-alpha} int s^{-1-beta} Ex(s r^2) (x) Ey(s) ds,
// with r = ay / ax and E the reference heat defect.
inline Eigen::MatrixXd rectangle_form(const SpectralBasis& basis, const Rectangle& R, double alpha,
                                      const FormOptions& opt) {
  const int nx = basis.nx, ny = basis.ny, N = nx * ny;
  const double ax = R.x.half_width(), ay = R.y.half_width();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
  if (alpha == 2.0) {
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < ny; ++j) {
        const double wx = sine_frequency(i + 1) / ax, wy = sine_frequency(j + 1) / ay;
        A(i * ny + j, i * ny + j) = wx * wx + wy * wy;
      }
    return A;
  }
  const Eigen::MatrixXd Ax = std::pow(ax, -alpha) * reference_form(alpha, nx, opt);
  const Eigen::MatrixXd Ay = std::pow(ay, -alpha) * reference_form(alpha, ny, opt);
  for (int i = 0; i < nx; ++i)
    for (int i2 = 0; i2 < nx; ++i2)
      for (int j = 0; j < ny; ++j) {
        A(i * ny + j, i2 * ny + j) += Ax(i, i2);
      }
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
      for (int j2 = 0; j2 < ny; ++j2) A(i * ny + j, i * ny + j2) += Ay(j, j2);

  const double beta = 0.5 * alpha, cb = beta / std::tgamma(1.0 - beta);
  const double r = ay / ax, r2 = r * r;
  const double wmax = std::max(sine_frequency(nx) * r, sine_frequency(ny));
  const double lo = opt.sigma_lo / (wmax * wmax);
  const double hi = opt.sigma_hi * std::max(1.0, 1.0 / r2);
  const auto nodes = log_nodes(lo, hi, opt);

  // Parity classes: only entries with i = i' and j = j' (mod 2) couple.
  std::vector<int> cls[2][2];
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) cls[i % 2][j % 2].push_back(i * ny + j);
  Eigen::MatrixXd blocks[2][2];
  for (int px = 0; px < 2; ++px)
    for (int py = 0; py < 2; ++py) {
      const auto n = static_cast<Eigen::Index>(cls[px][py].size());
      blocks[px][py] = Eigen::MatrixXd::Zero(n, n);
    }
  auto add_kron = [&](double w, const Eigen::MatrixXd& Ex, const Eigen::MatrixXd& Ey) {
    for (int px = 0; px < 2; ++px)
      for (int py = 0; py < 2; ++py) {
        auto& B = blocks[px][py];
        const auto& idx = cls[px][py];
        const auto n = static_cast<int>(idx.size());
        for (int p = 0; p < n; ++p) {
          const int i = idx[p] / ny, j = idx[p] % ny;
          for (int q = p; q < n; ++q) {
            const int i2 = idx[q] / ny, j2 = idx[q] % ny;
            B(p, q) += w * Ex(i, i2) * Ey(j, j2);
          }
        }
      }
  };
  std::vector<Eigen::MatrixXd> ex(nodes.size()), ey(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t q) {
    const double s = std::exp(nodes.x[q]);
    ex[q] = reference_heat_defect(s * r2, nx);
    ey[q] = reference_heat_defect(s, ny);
  });
  for (std::size_t q = 0; q < nodes.size(); ++q) {
    const double s = std::exp(nodes.x[q]);
    add_kron(nodes.w[q] * std::pow(s, -beta), ex[q], ey[q]);
  }
  // Small-s remainder: E(s) ~ s diag(w^2).
  {
    Eigen::MatrixXd Kx = Eigen::MatrixXd::Zero(nx, nx), Ky = Eigen::MatrixXd::Zero(ny, ny);
    for (int i = 0; i < nx; ++i) Kx(i, i) = sine_frequency(i + 1) * sine_frequency(i + 1) * r2;
    for (int j = 0; j < ny; ++j) Ky(j, j) = sine_frequency(j + 1) * sine_frequency(j + 1);
    add_kron(std::pow(lo, 2.0 - beta) / (2.0 - beta), Kx, Ky);
  }
  // Large-s remainder: E(s) ~ I - (4 pi s)^{-1/2} m m^T.
  {
    const Eigen::VectorXd mx = sine_means(nx), my = sine_means(ny);
    const double c = 1.0 / std::sqrt(4.0 * std::numbers::pi);
    const Eigen::MatrixXd Ix = Eigen::MatrixXd::Identity(nx, nx), Iy = Eigen::MatrixXd::Identity(ny, ny);
    const Eigen::MatrixXd Hx = (c / r) * (mx * mx.transpose()), Hy = c * (my * my.transpose());
    add_kron(std::pow(hi, -beta) / beta, Ix, Iy);
    add_kron(-std::pow(hi, -beta - 0.5) / (beta + 0.5), Hx, Iy);
    add_kron(-std::pow(hi, -beta - 0.5) / (beta + 0.5), Ix, Hy);
    add_kron(std::pow(hi, -beta - 1.0) / (beta + 1.0), Hx, Hy);
  }
  const double scale = cb * std::pow(ay, -alpha);
  for (int px = 0; px < 2; ++px)
    for (int py = 0; py < 2; ++py) {
      const auto& idx = cls[px][py];
      const auto& B = blocks[px][py];
      for (std::size_t p = 0; p < idx.size(); ++p)
        for (std::size_t q = p; q < idx.size(); ++q) {
          const double v = scale * B(p, q);
          A(idx[p], idx[q]) -= v;
          if (q != p) A(idx[q], idx[p]) -= v;
        }
    }
  return A;
}

}  // namespace detail

inline Eigen::MatrixXd assemble_form_matrix(const SpectralBasis& basis, double alpha,
                                            const FormOptions& opt = {}) {
  detail::check_alpha(alpha);
  return std::visit(
      [&](const auto& s) -> Eigen::MatrixXd {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, IntervalUnion>) {
          return detail::union_form(basis, s, alpha, opt);
        } else if constexpr (std::is_same_v<T, Rectangle>) {
          return detail::rectangle_form(basis, s, alpha, opt);
        } else {
          if (alpha != 2.0)
            throw UnsupportedError("disk domains are supported by the Galerkin solver only for alpha = 2");
          Eigen::MatrixXd A = Eigen::MatrixXd::Zero(basis.size, basis.size);
          for (int k = 0; k < basis.size; ++k) {
            const double j = basis.disk_modes[k].zero / s.radius;
            A(k, k) = j * j;
          }
          return A;
        }
      },
      basis.domain.shape());
}

inline Eigen::MatrixXd assemble_form_matrix(const Domain& D, double alpha, int n,
                                            const FormOptions& opt = {}) {
  detail::check_alpha(alpha);
  if (std::holds_alternative<Disk>(D.shape()) && alpha != 2.0)
    throw UnsupportedError("disk domains are supported by the Galerkin solver only for alpha = 2");
  return assemble_form_matrix(make_basis(D, n), alpha, opt);
}

}  // namespace fracspec
