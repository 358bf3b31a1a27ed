#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/SparseCholesky>

#include "fracspec/eigensolver.hpp"
#include "fracspec/error.hpp"
#include "fracspec/geometry.hpp"
#include "fracspec/kernels.hpp"
#include "fracspec/parallel.hpp"
#include "fracspec/quadrature.hpp"
#include "fracspec/rng.hpp"

namespace fracspec {

// Positive weight sampled at the cell midpoints of a uniform partition of
// (-l, l).
struct WeightProfile {
  std::vector<double> grid;
  std::vector<double> values;
  bool symmetric = false;

  double half_length() const {
    const double h = grid[1] - grid[0];
    return grid.back() + 0.5 * h;
  }
};

struct RayleighOutcome {
  double quotient = 0.0;
  double bound = 0.0;
  bool pass = false;
  std::vector<double> nodes;      // finite-element nodes on [-l, l]
  std::vector<double> minimizer;  // odd, max |f| = 1, f(l) > 0
};

namespace detail {

inline void require_positive(const std::vector<double>& v) {
  for (double x : v)
    if (!(x > 0.0)) throw DomainError("weight samples must be positive");
}

inline bool mirror_symmetric(const std::vector<double>& v, double tol = 1e-10) {
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  for (std::size_t i = 0, j = v.size() - 1; i < j; ++i, --j)
    if (std::abs(v[i] - v[j]) > tol * scale) return false;
  return true;
}

}  // namespace detail

inline WeightProfile make_profile(const std::function<double(double)>& g, double l, int samples = 2048) {
  if (!(l > 0.0)) throw DomainError("half-length must be positive");
  if (samples < 2) throw ValidationError("profile needs at least two samples");
  WeightProfile w;
  const double h = 2.0 * l / samples;
  for (int i = 0; i < samples; ++i) {
    w.grid.push_back(-l + (i + 0.5) * h);
    w.values.push_back(g(w.grid.back()));
  }
  detail::require_positive(w.values);
  w.symmetric = detail::mirror_symmetric(w.values);
  return w;
}

// phi_1^2 of a Galerkin result on an interval centred at the origin.
inline WeightProfile ground_state_profile(const SpectralResult& r, int samples = 2048) {
  const auto* u = std::get_if<IntervalUnion>(&r.basis.domain.shape());
  if (!u || u->intervals.size() != 1 || std::abs(u->intervals[0].center()) > 1e-12)
    throw PreconditionError("ground-state profile needs an interval centred at 0");
  return make_profile(
      [&](double x) {
        const double v = eigenfunction_eval(r, 1, Point{x});
        return v * v;
      },
      u->intervals[0].half_width(), samples);
}

// Midpoint concavity of log g on every adjacent triple of a uniform grid.
inline bool is_log_concave(const WeightProfile& w, double tol = 1e-9) {
  detail::require_positive(w.values);
  const std::size_t n = w.values.size();
  if (w.grid.size() != n) throw ValidationError("profile grid and values differ in length");
  if (n >= 3) {
    const double h = w.grid[1] - w.grid[0];
    for (std::size_t i = 2; i < n; ++i)
      if (std::abs(w.grid[i] - w.grid[i - 1] - h) > 1e-9 * std::abs(h))
        throw ValidationError("log-concavity test needs a uniform grid");
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double a = std::log(w.values[i - 1]), b = std::log(w.values[i]), c = std::log(w.values[i + 1]);
    if (a - 2.0 * b + c > tol * std::max({1.0, std::abs(a), std::abs(b), std::abs(c)})) return false;
  }
  return true;
}

// Smallest value of int f'^2 g / int f^2 g over odd f, by P1 elements on
// [0, l] with f(0) = 0 and a free end at l. Element e carries the weight
// sample at its midpoint.
inline RayleighOutcome min_antisymmetric_quotient(const WeightProfile& w, double l, double tol = 1e-4) {
  const std::size_t n = w.values.size();
  if (n < 16) throw ValidationError("antisymmetric quotient needs at least 16 weight samples");
  if (n % 2) throw ValidationError("antisymmetric quotient needs an even number of samples");
  detail::require_positive(w.values);
  if (!w.symmetric || !detail::mirror_symmetric(w.values)) throw PreconditionError("weight must be symmetric");
  if (std::abs(w.half_length() - l) > 1e-9 * l) throw ValidationError("profile does not span (-l, l)");

  const int m = static_cast<int>(n / 2);
  const double h = l / m;
  const double* g = w.values.data() + m;
  using Sp = Eigen::SparseMatrix<double>;
  std::vector<Eigen::Triplet<double>> kt, mt;
  // Unknowns are the nodal values at h, 2h, ..., l.
  for (int e = 0; e < m; ++e) {
    const double k = g[e] / h, s = g[e] * h / 6.0;
    const int a = e - 1, b = e;
    if (a >= 0) {
      kt.emplace_back(a, a, k);
      kt.emplace_back(a, b, -k);
      kt.emplace_back(b, a, -k);
      mt.emplace_back(a, a, 2 * s);
      mt.emplace_back(a, b, s);
      mt.emplace_back(b, a, s);
    }
    kt.emplace_back(b, b, k);
    mt.emplace_back(b, b, 2 * s);
  }
  Sp K(m, m), M(m, m);
  K.setFromTriplets(kt.begin(), kt.end());
  M.setFromTriplets(mt.begin(), mt.end());
  Eigen::SimplicialLDLT<Sp> chol(K);
  if (chol.info() != Eigen::Success) throw NumericError("stiffness factorization failed");

  Eigen::VectorXd x(m);
  for (int i = 0; i < m; ++i) x[i] = (i + 1.0) / m;
  double q = 0.0;
  for (int it = 0; it < 500; ++it) {
    Eigen::VectorXd y = chol.solve(M * x);
    const double next = y.dot(K * y) / y.dot(M * y);
    x = y / y.cwiseAbs().maxCoeff();
    const bool done = it > 0 && std::abs(next - q) <= 1e-15 * next;
    q = next;
    if (done) break;
  }

  RayleighOutcome out;
  out.quotient = q;
  out.bound = std::numbers::pi * std::numbers::pi / (4.0 * l * l);
  out.pass = q >= out.bound - tol;
  if (x[m - 1] < 0) x = -x;
  for (int i = -m; i <= m; ++i) {
    out.nodes.push_back(i * h);
    out.minimizer.push_back(i == 0 ? 0.0 : (i > 0 ? x[i - 1] : -x[-i - 1]));
  }
  return out;
}

struct DirectionalOutcome {
  double lhs = 0.0;  // int |df/dx1|^2 w
  double rhs = 0.0;  // pi^2 / (4 L^2) int f^2 w
  double half_extent = 0.0;
  bool pass = false;
};

// Both sides of the x1-directional weighted Poincare inequality on a
// rectangle symmetric in x1, for an odd (in x1) test function.
inline DirectionalOutcome directional_quotient_2d(const Domain& D, const std::function<double(const Point&)>& w,
                                                  const std::function<double(const Point&)>& f,
                                                  double tol = 1e-8, int panels = 16, int points = 8) {
  const auto* rect = std::get_if<Rectangle>(&D.shape());
  if (!rect || !is_symmetric_x1(D)) throw PreconditionError("directional quotient needs a rectangle symmetric in x1");
  const double L = rect->x.hi;
  const double ly = rect->y.hi - rect->y.lo;
  const auto bx = quad::composite(
      quad::graded_breaks(rect->x.lo, rect->x.hi, {rect->x.lo, 0.0, rect->x.hi}, 1e-3 * L, 2 * L / panels), points);
  const auto by = quad::composite(
      quad::graded_breaks(rect->y.lo, rect->y.hi, {rect->y.lo, rect->y.hi}, 1e-3 * ly, ly / panels), points);

  double fscale = 0.0, wscale = 0.0, fasym = 0.0, wasym = 0.0;
  for (int i = 1; i < 6; ++i)
    for (int j = 1; j < 6; ++j) {
      const Point p{L * i / 6.0, rect->y.lo + ly * j / 6.0};
      const Point q = reflect(p);
      const double fp = f(p), fq = f(q), wp = w(p), wq = w(q);
      fscale = std::max(fscale, std::abs(fp));
      wscale = std::max(wscale, std::abs(wp));
      fasym = std::max(fasym, std::abs(fp + fq));
      wasym = std::max(wasym, std::abs(wp - wq));
    }
  if (fasym > 1e-10 * fscale || fscale == 0.0) throw PreconditionError("test function must be odd in x1");
  if (wasym > 1e-10 * wscale) throw PreconditionError("weight must be symmetric in x1");

  const double h = 1e-5 * L;
  DirectionalOutcome out;
  out.half_extent = L;
  double grad = 0.0, mass = 0.0;
  for (std::size_t i = 0; i < bx.size(); ++i)
    for (std::size_t j = 0; j < by.size(); ++j) {
      const Point p{bx.x[i], by.x[j]};
      const double wt = bx.w[i] * by.w[j] * w(p);
      const double fx = (f(Point{p[0] + h, p[1]}) - f(Point{p[0] - h, p[1]})) / (2 * h);
      const double fv = f(p);
      grad += wt * fx * fx;
      mass += wt * fv * fv;
    }
  out.lhs = grad;
  out.rhs = std::numbers::pi * std::numbers::pi / (4.0 * L * L) * mass;
  out.pass = out.lhs >= out.rhs - tol * std::max(1.0, out.rhs);
  return out;
}

struct SkeletonGrid {
  int panels = 16;  // per axis and per interval component
  int points = 8;
};

namespace detail {

// Mass of the Cauchy kernel p_t(x, .) on D.
inline double cauchy_mass(const Domain& D, double t, const Point& x) {
  using std::numbers::pi;
  if (const auto* u = std::get_if<IntervalUnion>(&D.shape())) {
    double s = 0.0;
    for (const auto& iv : u->intervals) s += std::atan((iv.hi - x[0]) / t) - std::atan((iv.lo - x[0]) / t);
    return s / pi;
  }
  if (const auto* r = std::get_if<Rectangle>(&D.shape())) {
    auto F = [&](double a, double b) { return std::atan(a * b / (t * std::sqrt(t * t + a * a + b * b))); };
    const double a0 = r->x.lo - x[0], a1 = r->x.hi - x[0], b0 = r->y.lo - x[1], b1 = r->y.hi - x[1];
    return (F(a1, b1) - F(a0, b1) - F(a1, b0) + F(a0, b0)) / (2.0 * pi);
  }
  throw UnsupportedError("skeleton survival supports interval unions and rectangles");
}

struct CubatureSet {
  std::vector<Point> x;
  std::vector<double> w;
};

inline quad::Nodes skeleton_axis(const Interval& iv, const SkeletonGrid& g) {
  const double len = iv.hi - iv.lo;
  const auto br = quad::graded_breaks(iv.lo, iv.hi, {iv.lo, iv.hi}, len / (16.0 * g.panels), len / g.panels);
  return quad::composite(br, g.points);
}

inline CubatureSet skeleton_cubature(const Domain& D, const SkeletonGrid& g) {
  CubatureSet c;
  if (const auto* u = std::get_if<IntervalUnion>(&D.shape())) {
    for (const auto& iv : u->intervals) {
      const auto n = skeleton_axis(iv, g);
      for (std::size_t i = 0; i < n.size(); ++i) {
        c.x.push_back(Point{n.x[i]});
        c.w.push_back(n.w[i]);
      }
    }
  } else if (const auto* r = std::get_if<Rectangle>(&D.shape())) {
    const auto nx = skeleton_axis(r->x, g), ny = skeleton_axis(r->y, g);
    for (std::size_t i = 0; i < nx.size(); ++i)
      for (std::size_t j = 0; j < ny.size(); ++j) {
        c.x.push_back(Point{nx.x[i], ny.x[j]});
        c.w.push_back(nx.w[i] * ny.w[j]);
      }
  } else {
    throw UnsupportedError("skeleton survival supports interval unions and rectangles");
  }
  return c;
}

}  // namespace detail

// P_x{X_{t_1} in D, ..., X_{t_n} in D} for the Cauchy process, by iterated
// kernel quadrature. Each step subtracts the kernel singularity and adds it
// back through the closed-form mass of p_t on D.
inline double skeleton_survival(const Domain& D, const Point& x, const std::vector<double>& times,
                                const SkeletonGrid& grid = {}) {
  const std::size_t n = times.size();
  if (n == 0) throw ValidationError("at least one monitoring time is required");
  if (n > 4) throw UnsupportedError("deterministic skeleton quadrature is limited to 4 times; use Monte Carlo");
  for (std::size_t i = 0; i < n; ++i)
    if (!(times[i] > (i ? times[i - 1] : 0.0))) throw ValidationError("times must be positive and increasing");
  if (!D.contains(x)) throw PreconditionError("start point must lie in D");
  const int d = D.dim();
  if (n == 1) return detail::cauchy_mass(D, times[0], x);

  const auto cub = detail::skeleton_cubature(D, grid);
  std::vector<Point> eval = cub.x;
  eval.push_back(x);
  const std::size_t m = cub.x.size(), e = eval.size();
  std::vector<double> v(e), next(e);
  const double last = times[n - 1] - times[n - 2];
  for (std::size_t i = 0; i < e; ++i) v[i] = detail::cauchy_mass(D, last, eval[i]);
  for (std::size_t k = n - 1; k-- > 0;) {
    const double dt = times[k] - (k ? times[k - 1] : 0.0);
    // Only the start point is needed after the first step.
    const std::size_t lo = k == 0 ? e - 1 : 0;
    parallel_for(e - lo, [&](std::size_t idx) {
      const std::size_t i = lo + idx;
      double s = 0.0;
      for (std::size_t j = 0; j < m; ++j)
        s += cub.w[j] * cauchy_kernel(dt, eval[i], cub.x[j], d) * (v[j] - v[i]);
      next[i] = s + v[i] * detail::cauchy_mass(D, dt, eval[i]);
    });
    std::swap(v, next);
  }
  return v[e - 1];
}

struct LemmaOutcome {
  double integral = 0.0;    // int_0^T (f^2 + f'^2) e^{-ct}
  double bound = 0.0;       // f(0)^2 / (c + 1)
  double tail_bound = 0.0;  // sup(f^2 + f'^2) e^{-cT} / c
  bool pass = false;
};

// f sampled at t_i = i T / (n - 1). Derivatives use second-order
// differences and the integral Simpson's rule (trapezoid on a leftover panel).
inline LemmaOutcome check_lemma_derivative(const std::vector<double>& f, double T, double c, double tol = 1e-9) {
  if (!(c > 0.0)) throw DomainError("rate must be positive");
  if (!(T > 0.0)) throw DomainError("horizon must be positive");
  const std::size_t n = f.size();
  if (n < 3) throw ValidationError("need at least three samples");
  const double h = T / (n - 1);
  std::vector<double> g(n);
  double sup = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double df;
    if (i == 0) df = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * h);
    else if (i == n - 1) df = (3 * f[n - 1] - 4 * f[n - 2] + f[n - 3]) / (2 * h);
    else df = (f[i + 1] - f[i - 1]) / (2 * h);
    const double s = f[i] * f[i] + df * df;
    sup = std::max(sup, s);
    g[i] = s * std::exp(-c * i * h);
  }
  const std::size_t even = (n - 1) % 2 ? n - 2 : n - 1;
  double I = 0.0;
  for (std::size_t i = 0; i + 2 <= even; i += 2) I += h / 3 * (g[i] + 4 * g[i + 1] + g[i + 2]);
  if (even < n - 1) I += 0.5 * h * (g[n - 2] + g[n - 1]);

  LemmaOutcome out;
  out.integral = I;
  out.bound = f[0] * f[0] / (c + 1.0);
  out.tail_bound = sup * std::exp(-c * T) / c;
  out.pass = I >= out.bound - tol * std::max(1.0, out.bound);
  return out;
}

// Random trigonometric polynomial with frequencies in (0, omega_max].
struct BandLimited {
  double offset = 0.0;
  std::vector<double> omega, a, b;

  double operator()(double t) const {
    double s = offset;
    for (std::size_t k = 0; k < omega.size(); ++k) s += a[k] * std::cos(omega[k] * t) + b[k] * std::sin(omega[k] * t);
    return s;
  }
};

inline BandLimited random_band_limited(CounterRng& rng, int terms = 8, double omega_max = 10.0) {
  BandLimited f;
  f.offset = rng.normal();
  for (int k = 0; k < terms; ++k) {
    f.omega.push_back(omega_max * rng.uniform());
    f.a.push_back(rng.normal());
    f.b.push_back(rng.normal());
  }
  return f;
}

struct LemmaSuiteReport {
  int cases = 0;
  int violations = 0;
  double worst_ratio = 0.0;  // min over cases of I (c + 1) / f(0)^2
};

// Property suite: `count` random band-limited functions per rate, horizon
// 40 / c and step 1e-3.
inline LemmaSuiteReport lemma_derivative_suite(const std::vector<double>& rates, int count = 100,
                                               std::uint64_t seed = 2024) {
  LemmaSuiteReport rep;
  rep.worst_ratio = std::numeric_limits<double>::infinity();
  std::vector<LemmaOutcome> results(rates.size() * count);
  parallel_for(results.size(), [&](std::size_t idx) {
    const double c = rates[idx / count];
    CounterRng rng(seed, idx);
    const auto f = random_band_limited(rng);
    const double T = 40.0 / c;
    const std::size_t n = static_cast<std::size_t>(std::ceil(T / 1e-3)) + 1;
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = f(T * i / (n - 1));
    results[idx] = check_lemma_derivative(s, T, c);
  });
  for (std::size_t idx = 0; idx < results.size(); ++idx) {
    const auto& r = results[idx];
    ++rep.cases;
    if (!r.pass) ++rep.violations;
    if (r.bound > 0.0) rep.worst_ratio = std::min(rep.worst_ratio, r.integral / r.bound);
  }
  return rep;
}

}  // namespace fracspec
