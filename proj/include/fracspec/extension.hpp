#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <vector>

#include "fracspec/eigensolver.hpp"
#include "fracspec/error.hpp"
#include "fracspec/geometry.hpp"
#include "fracspec/kernels.hpp"
#include "fracspec/quadrature.hpp"

namespace fracspec {

using Sampler = std::function<double(const Point&)>;

// u(x, t) = int_D p_t(x - y) phi(y) dy with the Cauchy kernel, by adaptive
// quadrature. Works for any sampler; relative accuracy about 1e-10.
inline double extend(const Sampler& phi, double /*lambda*/, const Domain& D, double t, const Point& x,
                     double tol = 1e-11) {
  if (t < 0.0) throw DomainError("extend: t must be nonnegative");
  if (t == 0.0) return D.contains(x) ? phi(x) : 0.0;
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, IntervalUnion>) {
          double sum = 0.0;
          for (const auto& iv : s.intervals) {
            std::vector<double> br{iv.lo, iv.hi};
            for (double k : {0.0, 1.0, 8.0})
              for (double sg : {-1.0, 1.0}) {
                const double b = x[0] + sg * k * t;
                if (b > iv.lo && b < iv.hi) br.push_back(b);
              }
            std::sort(br.begin(), br.end());
            auto f = [&](double y) { return cauchy_kernel_r2(t, (x[0] - y) * (x[0] - y), 1) * phi(Point{y}); };
            sum += quad::adaptive_breaks(f, br, 0.0, tol).value;
          }
          return sum;
        } else {
          // Outer integral over y2, inner over y1 across the chord of D.
          auto chord = [&](double y2) -> std::pair<double, double> {
            if constexpr (std::is_same_v<T, Rectangle>) {
              return {s.x.lo, s.x.hi};
            } else {
              const double h = s.radius * s.radius - (y2 - s.cy) * (y2 - s.cy);
              const double w = h > 0.0 ? std::sqrt(h) : 0.0;
              return {s.cx - w, s.cx + w};
            }
          };
          double lo2, hi2;
          if constexpr (std::is_same_v<T, Rectangle>) {
            lo2 = s.y.lo;
            hi2 = s.y.hi;
          } else {
            lo2 = s.cy - s.radius;
            hi2 = s.cy + s.radius;
          }
          auto breaks_near = [&](double lo, double hi, double c) {
            std::vector<double> br{lo, hi};
            for (double k : {0.0, 1.0, 8.0})
              for (double sg : {-1.0, 1.0}) {
                const double b = c + sg * k * t;
                if (b > lo && b < hi) br.push_back(b);
              }
            std::sort(br.begin(), br.end());
            return br;
          };
          auto inner = [&](double y2) {
            const auto [lo1, hi1] = chord(y2);
            if (!(hi1 > lo1)) return 0.0;
            const double dy = x[1] - y2;
            auto f = [&](double y1) {
              const double dx = x[0] - y1;
              return cauchy_kernel_r2(t, dx * dx + dy * dy, 2) * phi(Point{y1, y2});
            };
            return quad::adaptive_breaks(f, breaks_near(lo1, hi1, x[0]), 0.0, 0.1 * tol).value;
          };
          return quad::adaptive_breaks(inner, breaks_near(lo2, hi2, x[1]), 0.0, tol).value;
        }
      },
      D.shape());
}

// Values and gradients of several extensions u_m = P_t phi_m on a product
// grid: t nodes times the tensor product of one point set per axis.
struct FieldGrid {
  std::vector<double> t;
  std::vector<std::vector<double>> axes;  // one per spatial dimension

  std::size_t points() const {
    std::size_t n = 1;
    for (const auto& a : axes) n *= a.size();
    return n;
  }
  Point point(std::size_t flat) const {
    Point p = Point::of_dim(static_cast<int>(axes.size()));
    for (int d = static_cast<int>(axes.size()) - 1; d >= 0; --d) {
      p[d] = axes[d][flat % axes[d].size()];
      flat /= axes[d].size();
    }
    return p;
  }
};

struct FieldValues {
  int modes = 0, dim = 1;
  std::size_t nt = 0, nx = 0;
  std::vector<double> u;     // [(m * nt + it) * nx + ix]
  std::vector<double> grad;  // [((m * nt + it) * nx + ix) * (dim + 1) + c], c = dim is d/dt

  void resize(int m, int d, std::size_t t, std::size_t x) {
    modes = m;
    dim = d;
    nt = t;
    nx = x;
    u.assign(static_cast<std::size_t>(m) * t * x, 0.0);
    grad.assign(u.size() * (d + 1), 0.0);
  }
  std::size_t at(int m, std::size_t it, std::size_t ix) const { return (m * nt + it) * nx + ix; }
};

// Evaluator for the harmonic extensions of Galerkin eigenfunctions.
class ModeExtension {
 public:
  virtual ~ModeExtension() = default;
  virtual void evaluate(const FieldGrid& grid, FieldValues& out) const = 0;
  int dim() const { return dim_; }
  int modes() const { return static_cast<int>(mode_ids_.size()); }
  const std::vector<int>& mode_ids() const { return mode_ids_; }

  // Single-point convenience; grad has dim + 1 entries.
  void at(const Point& x, double t, int m, double& u, double* grad) const {
    FieldGrid g;
    g.t = {t};
    for (int d = 0; d < dim_; ++d) g.axes.push_back({x[d]});
    FieldValues v;
    evaluate(g, v);
    u = v.u[v.at(m, 0, 0)];
    if (grad)
      for (int c = 0; c <= dim_; ++c) grad[c] = v.grad[v.at(m, 0, 0) * (dim_ + 1) + c];
  }

 protected:
  int dim_ = 1;
  std::vector<int> mode_ids_;
};

namespace detail {

// 1D: direct Poisson-kernel quadrature. Fixed base panels carry cached
// eigenfunction values; panels close to the evaluation point relative to t
// are subdivided geometrically toward x and sampled afresh.
class PoissonExtension1D final : public ModeExtension {
 public:
  PoissonExtension1D(const SpectralResult& r, std::vector<int> modes) : r_(r) {
    dim_ = 1;
    mode_ids_ = std::move(modes);
    const auto& U = std::get<IntervalUnion>(r.basis.domain.shape());
    const auto& rule = quad::gauss_legendre(kPoints);
    for (std::size_t c = 0; c < U.intervals.size(); ++c) {
      const Interval iv = U.intervals[c];
      const double wmax = sine_frequency(r.basis.component_modes(c)) / iv.half_width();
      const double hmax = std::min(0.25 * (iv.hi - iv.lo), 6.0 / wmax);
      const int np = static_cast<int>(std::ceil((iv.hi - iv.lo) / hmax));
      for (int p = 0; p < np; ++p) {
        Panel pan;
        pan.a = iv.lo + (iv.hi - iv.lo) * p / np;
        pan.b = iv.lo + (iv.hi - iv.lo) * (p + 1) / np;
        pan.first = static_cast<int>(y_.size());
        const double h = 0.5 * (pan.b - pan.a), mid = 0.5 * (pan.a + pan.b);
        for (int i = 0; i < kPoints; ++i) {
          y_.push_back(mid + h * rule.nodes[i]);
          w_.push_back(h * rule.weights[i]);
        }
        panels_.push_back(pan);
      }
    }
    phi_.resize(y_.size() * mode_ids_.size());
    for (std::size_t i = 0; i < y_.size(); ++i)
      for (std::size_t m = 0; m < mode_ids_.size(); ++m)
        phi_[i * mode_ids_.size() + m] = eigenfunction_eval(r_, mode_ids_[m], Point{y_[i]});
  }

  void evaluate(const FieldGrid& grid, FieldValues& out) const override {
    const auto& xs = grid.axes.at(0);
    out.resize(modes(), 1, grid.t.size(), xs.size());
    std::vector<double> acc(3 * mode_ids_.size());
    for (std::size_t it = 0; it < grid.t.size(); ++it)
      for (std::size_t ix = 0; ix < xs.size(); ++ix) {
        point(xs[ix], grid.t[it], acc.data());
        for (int m = 0; m < modes(); ++m) {
          const std::size_t k = out.at(m, it, ix);
          out.u[k] = acc[3 * m];
          out.grad[2 * k] = acc[3 * m + 1];
          out.grad[2 * k + 1] = acc[3 * m + 2];
        }
      }
  }

 private:
  static constexpr int kPoints = 16;
  struct Panel {
    double a, b;
    int first;
  };

  // acc[3m..3m+2] = (u, du/dx, du/dt) for mode m.
  void point(double x, double t, double* acc) const {
    const std::size_t M = mode_ids_.size();
    std::fill(acc, acc + 3 * M, 0.0);
    if (t <= 0.0) {
      for (std::size_t m = 0; m < M; ++m) acc[3 * m] = eigenfunction_eval(r_, mode_ids_[m], Point{x});
      for (std::size_t m = 0; m < M; ++m) acc[3 * m + 1] = acc[3 * m + 2] = std::numeric_limits<double>::quiet_NaN();
      return;
    }
    const double t2 = t * t;
    auto add = [&](double y, double w, const double* phi) {
      const double r = x - y, q = t2 + r * r;
      const double p = w * t / (std::numbers::pi * q);
      const double px = -2.0 * w * t * r / (std::numbers::pi * q * q);
      const double pt = w * (r * r - t2) / (std::numbers::pi * q * q);
      for (std::size_t m = 0; m < M; ++m) {
        acc[3 * m] += p * phi[m];
        acc[3 * m + 1] += px * phi[m];
        acc[3 * m + 2] += pt * phi[m];
      }
    };
    const auto& rule = quad::gauss_legendre(kPoints);
    std::vector<double> fresh(M);
    for (const Panel& pan : panels_) {
      const double len = pan.b - pan.a;
      const double dist = x < pan.a ? pan.a - x : (x > pan.b ? x - pan.b : 0.0);
      if (std::hypot(dist, t) >= len) {
        for (int i = pan.first; i < pan.first + kPoints; ++i) add(y_[i], w_[i], &phi_[i * M]);
        continue;
      }
      std::vector<double> br{pan.a, pan.b};
      if (x > pan.a && x < pan.b) br.push_back(x);
      for (double h = t; h < len + dist; h *= 2.0)
        for (double b : {x - h, x + h})
          if (b > pan.a && b < pan.b) br.push_back(b);
      std::sort(br.begin(), br.end());
      for (std::size_t k = 0; k + 1 < br.size(); ++k) {
        const double hh = 0.5 * (br[k + 1] - br[k]), mid = 0.5 * (br[k + 1] + br[k]);
        if (hh <= 0.0) continue;
        for (int i = 0; i < kPoints; ++i) {
          const double y = mid + hh * rule.nodes[i];
          for (std::size_t m = 0; m < M; ++m) fresh[m] = eigenfunction_eval(r_, mode_ids_[m], Point{y});
          add(y, hh * rule.weights[i], fresh.data());
        }
      }
    }
  }

  const SpectralResult& r_;
  std::vector<Panel> panels_;
  std::vector<double> y_, w_, phi_;
};

// Heat-smoothed sine modes: h[k] = int g_s(x - y) b_k(y) dy and hx[k] =
// d/dx of the same, k = 0..n-1, for the normalized modes of iv.
inline void heat_smooth_modes(const Interval& iv, int n, double x, double s, double* h, double* hx) {
  std::fill(h, h + n, 0.0);
  std::fill(hx, hx + n, 0.0);
  const double rs = std::sqrt(s);
  const double lo = std::max(iv.lo, x - 13.0 * rs), hi = std::min(iv.hi, x + 13.0 * rs);
  if (!(hi > lo)) return;
  const double a = iv.half_width(), wmax = sine_frequency(n) / a;
  const double hmax = std::min(1.5 * rs, 4.0 / wmax);
  std::vector<double> br{lo, hi};
  if (x > lo && x < hi) br.push_back(x);
  std::sort(br.begin(), br.end());
  const auto& rule = quad::gauss_legendre(10);
  const double norm = 1.0 / std::sqrt(4.0 * std::numbers::pi * s * a);
  std::vector<double> S(n);
  for (std::size_t k = 0; k + 1 < br.size(); ++k) {
    const double len = br[k + 1] - br[k];
    const int np = std::max(1, static_cast<int>(std::ceil(len / hmax)));
    for (int p = 0; p < np; ++p) {
      const double pa = br[k] + len * p / np, pb = br[k] + len * (p + 1) / np;
      const double hh = 0.5 * (pb - pa), mid = 0.5 * (pa + pb);
      for (int i = 0; i < 10; ++i) {
        const double y = mid + hh * rule.nodes[i];
        const double z = x - y;
        const double g = hh * rule.weights[i] * norm * std::exp(-z * z / (4.0 * s));
        if (g == 0.0) continue;
        const double gx = -g * z / (2.0 * s);
        sine_table(sine_frequency(1) * (y - iv.lo) / a, n, S.data());
        for (int j = 0; j < n; ++j) {
          h[j] += g * S[j];
          hx[j] += gx * S[j];
        }
      }
    }
  }
}

// 2D rectangles: subordination p_t = int g_{1/2}(t, s) G_s ds turns the
// Cauchy extension into an integral over heat times s of separable
// Gaussian smoothings, one 1D quadrature per axis.
class SubordinatedExtension2D final : public ModeExtension {
 public:
  SubordinatedExtension2D(const SpectralResult& r, std::vector<int> modes)
      : R_(std::get<Rectangle>(r.basis.domain.shape())), nx_(r.basis.nx), ny_(r.basis.ny) {
    dim_ = 2;
    mode_ids_ = std::move(modes);
    for (int id : mode_ids_) {
      if (id < 1 || id > r.size()) throw IndexError("mode index out of range");
      Eigen::MatrixXd C(nx_, ny_);
      for (int i = 0; i < nx_; ++i)
        for (int j = 0; j < ny_; ++j) C(i, j) = r.coefficients(i * ny_ + j, id - 1);
      coef_.push_back(C);
      double mass = 0.0;
      for (int k = 0; k < r.basis.size; ++k) mass += r.coefficients(k, id - 1) * r.basis.integral(k);
      mass_.push_back(mass);
    }
  }

  void evaluate(const FieldGrid& grid, FieldValues& out) const override {
    const auto &x1 = grid.axes.at(0), &x2 = grid.axes.at(1);
    const std::size_t n1 = x1.size(), n2 = x2.size(), nt = grid.t.size(), nxy = n1 * n2;
    const int M = modes();
    out.resize(M, 2, nt, nxy);
    double tmin = std::numeric_limits<double>::infinity();
    for (double t : grid.t) {
      if (!(t > 0.0)) throw DomainError("subordinated extension requires t > 0");
      tmin = std::min(tmin, t);
    }
    // Heat times beyond shi only see the monopole; 1e4 rho^2 keeps the
    // dipole remainder below 1e-4 relative at the farthest grid point.
    double rho2 = 1.0;
    for (double t : grid.t) rho2 = std::max(rho2, t * t);
    rho2 += std::max(x1.front() * x1.front(), x1.back() * x1.back()) +
            std::max(x2.front() * x2.front(), x2.back() * x2.back());
    const double slo = tmin * tmin / 160.0, shi = 1e4 * rho2;
    const double la = std::log(slo), lb = std::log(shi);
    const int panels = static_cast<int>(std::ceil((lb - la) / 0.5));
    const auto nodes = quad::composite(quad::uniform_breaks(la, lb, panels), 8);

    Eigen::MatrixXd Hx(nx_, n1), Hxd(nx_, n1), Hy(ny_, n2), Hyd(ny_, n2);
    std::vector<double> a(nt), b(nt);
    for (std::size_t q = 0; q < nodes.size(); ++q) {
      const double s = std::exp(nodes.x[q]);
      bool any = false;
      for (std::size_t it = 0; it < nt; ++it) {
        const double t = grid.t[it];
        const double g = t * t > 160.0 * s ? 0.0 : nodes.w[q] * s * subordinator_density_half(t, s);
        a[it] = g;
        b[it] = g * (1.0 / t - t / (2.0 * s));
        any = any || g > 0.0;
      }
      if (!any) continue;
      for (std::size_t i = 0; i < n1; ++i) heat_smooth_modes(R_.x, nx_, x1[i], s, &Hx(0, i), &Hxd(0, i));
      for (std::size_t j = 0; j < n2; ++j) heat_smooth_modes(R_.y, ny_, x2[j], s, &Hy(0, j), &Hyd(0, j));
      for (int m = 0; m < M; ++m) {
        const Eigen::MatrixXd T1 = coef_[m] * Hy, T2 = coef_[m] * Hyd;
        // Row-major flattening (i * n2 + j) matches FieldGrid::point.
        const Eigen::MatrixXd F = Hx.transpose() * T1, F1 = Hxd.transpose() * T1, F2 = Hx.transpose() * T2;
        for (std::size_t it = 0; it < nt; ++it) {
          if (a[it] == 0.0) continue;
          double* u = &out.u[out.at(m, it, 0)];
          double* gr = &out.grad[out.at(m, it, 0) * 3];
          for (std::size_t i = 0; i < n1; ++i)
            for (std::size_t j = 0; j < n2; ++j) {
              const std::size_t k = i * n2 + j;
              u[k] += a[it] * F(i, j);
              gr[3 * k] += a[it] * F1(i, j);
              gr[3 * k + 1] += a[it] * F2(i, j);
              gr[3 * k + 2] += b[it] * F(i, j);
            }
        }
      }
    }
    // Beyond shi the smoothed field is its monopole (4 pi s)^{-1} mass.
    for (int m = 0; m < M; ++m)
      for (std::size_t it = 0; it < nt; ++it) {
        const double t = grid.t[it];
        const double tail = t * std::pow(4.0 * std::numbers::pi, -1.5) * mass_[m] * std::pow(shi, -1.5) / 1.5;
        for (std::size_t k = 0; k < nxy; ++k) {
          out.u[out.at(m, it, k)] += tail;
          out.grad[out.at(m, it, k) * 3 + 2] += tail / t;
        }
      }
  }

 private:
  Rectangle R_;
  int nx_, ny_;
  std::vector<Eigen::MatrixXd> coef_;
  std::vector<double> mass_;
};

}  // namespace detail

// Fast evaluator for the extensions of the given (1-based) modes. The
// result must outlive the returned object.
inline std::unique_ptr<ModeExtension> make_mode_extension(const SpectralResult& r, std::vector<int> modes) {
  for (int m : modes)
    if (m < 1 || m > r.size()) throw IndexError("mode index out of range");
  if (std::holds_alternative<IntervalUnion>(r.basis.domain.shape()))
    return std::make_unique<detail::PoissonExtension1D>(r, std::move(modes));
  if (std::holds_alternative<Rectangle>(r.basis.domain.shape()))
    return std::make_unique<detail::SubordinatedExtension2D>(r, std::move(modes));
  throw UnsupportedError("harmonic extensions are implemented for interval unions and rectangles");
}

// Sampled extension u(x, t) on a grid of the half-space, with an evaluator
// for off-grid stencils.
struct ExtensionField {
  FieldGrid grid;
  std::vector<double> values;        // [it * points + ix]
  std::vector<double> phi_boundary;  // u(x, 0) at the spatial grid points
  double lambda = 0.0;
  std::function<double(const Point&, double)> eval;

  int dim() const { return static_cast<int>(grid.axes.size()); }
};

inline ExtensionField sample_field(std::function<double(const Point&, double)> u, FieldGrid grid, double lambda) {
  ExtensionField f;
  f.grid = std::move(grid);
  f.eval = std::move(u);
  f.lambda = lambda;
  const std::size_t P = f.grid.points();
  for (double t : f.grid.t)
    for (std::size_t i = 0; i < P; ++i) f.values.push_back(f.eval(f.grid.point(i), t));
  for (std::size_t i = 0; i < P; ++i) f.phi_boundary.push_back(f.eval(f.grid.point(i), 0.0));
  return f;
}

// Extension of Galerkin mode n sampled on `grid`; the result must outlive
// the field.
inline ExtensionField extension_field(const SpectralResult& r, int n, FieldGrid grid) {
  std::shared_ptr<ModeExtension> ev = make_mode_extension(r, {n});
  auto u = [ev, &r, n](const Point& x, double t) {
    if (t == 0.0) return eigenfunction_eval(r, n, x);
    double v;
    ev->at(x, t, 0, v, nullptr);
    return v;
  };
  return sample_field(u, std::move(grid), r.lambda(n));
}

// (d+1)-dimensional second-difference Laplacian of u at (x, t).
inline double check_harmonic(const ExtensionField& f, const Point& x, double t, double h) {
  if (!(h > 0.0)) throw DomainError("stencil width must be positive");
  if (t <= 2.0 * h || t + 2.0 * h > f.grid.t.back()) throw RangeError("stencil leaves the time grid");
  for (int d = 0; d < f.dim(); ++d) {
    const auto& ax = f.grid.axes[d];
    if (x[d] - 2.0 * h < ax.front() || x[d] + 2.0 * h > ax.back()) throw RangeError("stencil leaves the grid");
  }
  const double c = f.eval(x, t);
  double lap = (f.eval(x, t + h) - 2.0 * c + f.eval(x, t - h)) / (h * h);
  for (int d = 0; d < f.dim(); ++d) {
    Point p = x, m = x;
    p[d] += h;
    m[d] -= h;
    lap += (f.eval(p, t) - 2.0 * c + f.eval(m, t)) / (h * h);
  }
  return lap;
}

// |(u(x,h) - u(x,0))/h + lambda phi(x)| for x in D; |u(x, 0)| outside.
inline double check_boundary_derivative(const ExtensionField& f, const Domain& D, const Point& x, double h) {
  if (!(h > 0.0)) throw DomainError("step must be positive");
  const double u0 = f.eval(x, 0.0);
  if (!D.contains(x)) return std::abs(u0);
  return std::abs((f.eval(x, h) - u0) / h + f.lambda * u0);
}

}  // namespace fracspec
