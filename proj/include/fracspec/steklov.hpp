#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <vector>

#include "fracspec/eigensolver.hpp"
#include "fracspec/error.hpp"
#include "fracspec/extension.hpp"
#include "fracspec/parallel.hpp"
#include "fracspec/quadrature.hpp"

namespace fracspec {

// Truncated half-space H_eps = [-R, R]^d x [eps, T].
struct Truncation {
  double eps = 1e-3;
  double T = 30.0;
  double R = 60.0;
};

inline Truncation default_truncation(int dim) {
  return dim == 1 ? Truncation{1e-3, 30.0, 60.0} : Truncation{1e-3, 20.0, 40.0};
}

struct QOptions {
  int t_points = 8;          // Gauss points per geometric time panel
  int x_points = 0;          // per spatial panel; 0 picks 8 in 1D and 6 in 2D
  double grade = 0.25;       // finest spatial panel as a multiple of t
  int chunk_panels = 0;      // time panels sharing one spatial grid; 0 picks 1 in 1D, 3 in 2D
};

struct QResult {
  double value = 0.0;
  Truncation truncation;
  double tail_bound = 0.0;      // far-field mass outside the box, from the decay envelope
  double strip_estimate = 0.0;  // eps * (integral over the slice t = eps)
  std::size_t points = 0;
};

namespace detail {

struct AxisSpec {
  double lo = 0.0, hi = 0.0;
  std::vector<double> foci;
  std::vector<Interval> inside;
  double wmax = 8.0;  // highest spatial frequency carried by the fields
};

struct Slab {
  FieldGrid grid;
  std::vector<double> wt;
  std::vector<std::vector<double>> wx;
  double weight(std::size_t it, std::size_t flat) const {
    double w = wt[it];
    for (int d = static_cast<int>(wx.size()) - 1; d >= 0; --d) {
      w *= wx[d][flat % wx[d].size()];
      flat /= wx[d].size();
    }
    return w;
  }
};

inline quad::Nodes axis_nodes(const AxisSpec& ax, double lo, double hi, double finest, double coarsest,
                              double cap_in, int ppp) {
  const auto br = quad::graded_breaks(lo, hi, ax.foci, finest, coarsest);
  std::vector<double> out{br.front()};
  for (std::size_t i = 1; i < br.size(); ++i) {
    const double a = br[i - 1], b = br[i];
    double cap = coarsest;
    for (const auto& iv : ax.inside)
      if (a < iv.hi && b > iv.lo) cap = std::min(cap, cap_in);
    const int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / cap - 1e-12)));
    for (int k = 1; k < pieces; ++k) out.push_back(a + (b - a) * k / pieces);
    out.push_back(b);
  }
  return quad::composite(out, ppp);
}

// Panels growing geometrically away from `from` toward `to`.
inline quad::Nodes far_nodes(double from, double to, double first, double cap, int ppp) {
  std::vector<double> br{from};
  const double dir = to > from ? 1.0 : -1.0;
  double w = first;
  while (dir * (to - br.back()) > 1.5 * w) {
    br.push_back(br.back() + dir * w);
    w = std::min(2.0 * w, cap);
  }
  br.push_back(to);
  if (dir < 0) std::reverse(br.begin(), br.end());
  return quad::composite(br, ppp);
}

inline std::vector<double> geometric_breaks(double lo, double hi) {
  std::vector<double> br{lo};
  while (br.back() * 2.0 < hi * 0.75) br.push_back(br.back() * 2.0);
  br.push_back(hi);
  return br;
}

struct SlabPlan {
  std::vector<Slab> slabs;
  std::vector<Slab> strip;  // slices at t = eps with weight eps
};

// Time panels grow geometrically from eps to T and are grouped into chunks.
// Space is tiled per axis into a near segment (D plus a margin) and far
// segments; only the all-near tile is graded toward the boundary of D.
inline SlabPlan plan_slabs(const std::vector<AxisSpec>& axes, double eps, double T, bool far_field,
                           const QOptions& opt) {
  if (!(eps > 0.0)) throw DomainError("truncation eps must be positive");
  if (!(T > eps)) throw ValidationError("truncation requires eps < T");
  const int dim = static_cast<int>(axes.size());
  const int ppx = opt.x_points > 0 ? opt.x_points : (dim == 1 ? 8 : 6);
  const int chunk = opt.chunk_panels > 0 ? opt.chunk_panels : (dim == 1 ? 1 : 3);
  const auto tb = geometric_breaks(eps, T);
  const auto& rule = quad::gauss_legendre(opt.t_points);

  struct Segment {
    double a, b;
    bool near;
  };
  std::vector<std::vector<Segment>> segs(dim);
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& ax : axes)
    for (const auto& iv : ax.inside) margin = std::min(margin, std::max(0.5, iv.half_width()));
  for (int d = 0; d < dim; ++d) {
    const auto& ax = axes[d];
    if (!far_field) {
      segs[d].push_back({ax.lo, ax.hi, true});
      continue;
    }
    const auto [fmin, fmax] = std::minmax_element(ax.foci.begin(), ax.foci.end());
    const double a = std::max(ax.lo, *fmin - margin), b = std::min(ax.hi, *fmax + margin);
    if (a > ax.lo) segs[d].push_back({ax.lo, a, false});
    segs[d].push_back({a, b, true});
    if (b < ax.hi) segs[d].push_back({b, ax.hi, false});
  }

  auto tiles = [&](double tmin, std::vector<double> t, std::vector<double> wt, std::vector<Slab>& dst) {
    std::vector<std::size_t> pick(dim, 0);
    for (;;) {
      bool fine = true;
      for (int d = 0; d < dim; ++d) fine = fine && segs[d][pick[d]].near;
      Slab s;
      s.grid.t = t;
      s.wt = wt;
      for (int d = 0; d < dim; ++d) {
        const auto& ax = axes[d];
        const Segment& g = segs[d][pick[d]];
        const double cap_in = std::max(tmin, 2.0 / ax.wmax);
        quad::Nodes n;
        if (g.near && fine) {
          n = axis_nodes(ax, g.a, g.b, opt.grade * tmin, far_field ? 0.5 * margin : cap_in, cap_in, ppx);
        } else if (g.near) {
          n = quad::composite(quad::uniform_breaks(g.a, g.b, static_cast<int>(std::ceil(2.0 * (g.b - g.a) / margin))), ppx);
        } else {
          const bool left = g.a == ax.lo;
          n = far_nodes(left ? g.b : g.a, left ? g.a : g.b, 0.5 * margin, (ax.hi - ax.lo) / 8.0, ppx);
        }
        s.grid.axes.push_back(n.x);
        s.wx.push_back(n.w);
      }
      dst.push_back(std::move(s));
      int d = dim - 1;
      while (d >= 0 && ++pick[d] == segs[d].size()) pick[d--] = 0;
      if (d < 0) break;
    }
  };

  SlabPlan plan;
  for (std::size_t p = 0; p + 1 < tb.size(); p += chunk) {
    std::vector<double> t, wt;
    const std::size_t last = std::min(tb.size() - 1, p + chunk);
    for (std::size_t k = p; k < last; ++k) {
      const double h = 0.5 * (tb[k + 1] - tb[k]), c = 0.5 * (tb[k + 1] + tb[k]);
      for (int i = 0; i < opt.t_points; ++i) {
        t.push_back(c + h * rule.nodes[i]);
        wt.push_back(h * rule.weights[i]);
      }
    }
    tiles(tb[p], t, wt, plan.slabs);
  }
  tiles(eps, {eps}, {eps}, plan.strip);
  return plan;
}

// +1 / -1 when mode n is even / odd under reflection of the given axis
// through the origin, 0 when it has no definite parity.
inline int axis_parity(const SpectralResult& r, int n, int axis, double tol = 1e-10) {
  const auto& sh = r.basis.domain.shape();
  if (const auto* U = std::get_if<IntervalUnion>(&sh)) {
    (void)U;
    if (axis != 0 || !is_symmetric_x1(r.basis.domain)) return 0;
    const Symmetry s = r.symmetry_labels[n - 1];
    return s == Symmetry::symmetric ? 1 : (s == Symmetry::antisymmetric ? -1 : 0);
  }
  if (const auto* R = std::get_if<Rectangle>(&sh)) {
    const Interval& iv = axis == 0 ? R->x : R->y;
    if (std::abs(iv.center()) > 1e-12 * iv.half_width()) return 0;
    double odd = 0.0, even = 0.0;  // coefficient mass on odd / even 1D indices
    for (int i = 0; i < r.basis.nx; ++i)
      for (int j = 0; j < r.basis.ny; ++j) {
        const int k = (axis == 0 ? i : j) + 1;
        (k % 2 ? odd : even) += std::abs(r.coefficients(i * r.basis.ny + j, n - 1));
      }
    if (even <= tol * (odd + even)) return 1;
    if (odd <= tol * (odd + even)) return -1;
  }
  return 0;
}

inline std::vector<AxisSpec> field_axes(const SpectralResult& r, double lo, double hi) {
  std::vector<AxisSpec> axes;
  const auto& sh = r.basis.domain.shape();
  if (const auto* U = std::get_if<IntervalUnion>(&sh)) {
    AxisSpec ax{lo, hi, {}, U->intervals, 8.0};
    for (std::size_t c = 0; c < U->intervals.size(); ++c) {
      const auto& iv = U->intervals[c];
      ax.foci.push_back(iv.lo);
      ax.foci.push_back(iv.hi);
      ax.wmax = std::max(ax.wmax, sine_frequency(r.basis.component_modes(c)) / iv.half_width());
    }
    axes.push_back(ax);
  } else {
    const auto& R = std::get<Rectangle>(sh);
    for (int d = 0; d < 2; ++d) {
      const Interval& iv = d == 0 ? R.x : R.y;
      const int n = d == 0 ? r.basis.nx : r.basis.ny;
      axes.push_back(AxisSpec{lo, hi, {iv.lo, iv.hi}, {iv}, std::max(8.0, sine_frequency(n) / iv.half_width())});
    }
  }
  return axes;
}

inline void require_cauchy(const SpectralResult& r) {
  if (std::abs(r.alpha - 1.0) > 1e-12)
    throw PreconditionError("harmonic-extension identities hold for alpha = 1 only");
  const auto& sh = r.basis.domain.shape();
  if (!std::holds_alternative<IntervalUnion>(sh) && !std::holds_alternative<Rectangle>(sh))
    throw UnsupportedError("harmonic extensions are implemented for interval unions and rectangles");
}

// Distance from x in D to the boundary of D (interval unions, rectangles).
inline double boundary_depth(const Domain& D, const Point& x) {
  const auto& sh = D.shape();
  if (const auto* U = std::get_if<IntervalUnion>(&sh)) {
    for (const auto& iv : U->intervals)
      if (iv.contains(x[0])) return std::min(x[0] - iv.lo, iv.hi - x[0]);
    return 0.0;
  }
  if (const auto* R = std::get_if<Rectangle>(&sh))
    return std::max(0.0, std::min({x[0] - R->x.lo, R->x.hi - x[0], x[1] - R->y.lo, R->y.hi - x[1]}));
  return 0.0;
}

// Half the surface of the unit sphere in R^{d+1}.
inline double half_sphere(int d) { return d == 1 ? std::numbers::pi : 2.0 * std::numbers::pi; }

// Far-field envelope: C = max integrand * rho^{2d+2} over grid points with
// rho >= rho0 / 2; mass outside rho0 is at most C |S^d|/2 rho0^{-(d+1)}/(d+1).
struct Envelope {
  double rho0 = 0.0, C = 0.0;
  int dim = 1;
  void add(const Point& x, double t, double f) {
    double r2 = t * t;
    for (int d = 0; d < dim; ++d) r2 += x[d] * x[d];
    if (r2 >= 0.25 * rho0 * rho0) C = std::max(C, std::abs(f) * std::pow(r2, dim + 1.0));
  }
  double bound() const { return C * half_sphere(dim) * std::pow(rho0, -(dim + 1.0)) / (dim + 1.0); }
};

}  // namespace detail

// Q(u, v) = int_{H_eps} grad u . grad v  u1^2 for the ratio fields
// u = u_a / u_1 and v = u_b / u_1 of Galerkin modes a and b (mode 1 gives
// the constant field). Requires alpha = 1.
inline QResult q_functional(const SpectralResult& r, int a, int b, std::optional<Truncation> trunc = std::nullopt,
                            const QOptions& opt = {}) {
  detail::require_cauchy(r);
  const int dim = r.basis.domain.dim();
  const Truncation tr = trunc.value_or(default_truncation(dim));
  if (!(tr.R > 0.0)) throw ValidationError("truncation radius must be positive");
  std::vector<int> ids{1};
  for (int m : {a, b})
    if (std::find(ids.begin(), ids.end(), m) == ids.end()) ids.push_back(m);
  const auto ev = make_mode_extension(r, ids);
  const int ia = static_cast<int>(std::find(ids.begin(), ids.end(), a) - ids.begin());
  const int ib = static_cast<int>(std::find(ids.begin(), ids.end(), b) - ids.begin());

  QResult out;
  out.truncation = tr;
  if (a == 1 || b == 1) return out;

  // Fold mirror-symmetric axes when the integrand is even in them.
  std::vector<bool> fold(dim, false);
  for (int d = 0; d < dim; ++d) {
    const int p1 = detail::axis_parity(r, 1, d), pa = detail::axis_parity(r, a, d), pb = detail::axis_parity(r, b, d);
    fold[d] = p1 != 0 && pa != 0 && pb != 0 && pa * pb == 1;
  }
  auto axes = detail::field_axes(r, -tr.R, tr.R);
  for (int d = 0; d < dim; ++d)
    if (fold[d]) axes[d].lo = 0.0;
  double mult = 1.0;
  for (int d = 0; d < dim; ++d)
    if (fold[d]) mult *= 2.0;

  const auto plan = detail::plan_slabs(axes, tr.eps, tr.T, true, opt);
  const int C = dim + 1;
  auto integrate = [&](const detail::Slab& s, double& sum, detail::Envelope* env, std::size_t& pts) {
    FieldValues v;
    ev->evaluate(s.grid, v);
    const std::size_t P = s.grid.points();
    for (std::size_t it = 0; it < s.grid.t.size(); ++it)
      for (std::size_t ix = 0; ix < P; ++ix) {
        const double u1 = v.u[v.at(0, it, ix)];
        if (!(u1 > 0.0)) throw NumericError("ground-state extension is not positive on the grid");
        const double* g1 = &v.grad[v.at(0, it, ix) * C];
        const double wa = v.u[v.at(ia, it, ix)] / u1, wb = v.u[v.at(ib, it, ix)] / u1;
        const double* ga = &v.grad[v.at(ia, it, ix) * C];
        const double* gb = &v.grad[v.at(ib, it, ix) * C];
        double f = 0.0;
        for (int c = 0; c < C; ++c) f += (ga[c] - wa * g1[c]) * (gb[c] - wb * g1[c]);
        sum += s.weight(it, ix) * f;
        if (env) env->add(s.grid.point(ix), s.grid.t[it], f);
      }
    pts += P * s.grid.t.size();
  };

  std::vector<double> sums(plan.slabs.size(), 0.0);
  std::vector<detail::Envelope> envs(plan.slabs.size(), detail::Envelope{std::min(tr.R, tr.T), 0.0, dim});
  std::vector<std::size_t> counts(plan.slabs.size(), 0);
  parallel_for(plan.slabs.size(), [&](std::size_t k) { integrate(plan.slabs[k], sums[k], &envs[k], counts[k]); });
  detail::Envelope env{std::min(tr.R, tr.T), 0.0, dim};
  for (std::size_t k = 0; k < sums.size(); ++k) {
    out.value += mult * sums[k];
    env.C = std::max(env.C, envs[k].C);
    out.points += counts[k];
  }
  out.tail_bound = env.bound();
  double strip = 0.0;
  std::size_t dummy = 0;
  for (const auto& sl : plan.strip) integrate(sl, strip, nullptr, dummy);
  out.strip_estimate = mult * strip;
  return out;
}

using HalfSpaceField = std::function<double(const Point&, double)>;

// Q(u, v) for arbitrary fields on H_eps with central-difference gradients.
// `D` only guides the grading of the grid toward its boundary.
inline QResult q_functional(const HalfSpaceField& u, const HalfSpaceField& v, const HalfSpaceField& u1,
                            const Domain& D, std::optional<Truncation> trunc = std::nullopt,
                            const QOptions& opt = {}) {
  const int dim = D.dim();
  const Truncation tr = trunc.value_or(default_truncation(dim));
  const auto box = D.bounding_box();
  std::vector<detail::AxisSpec> axes;
  for (int d = 0; d < dim; ++d)
    axes.push_back(detail::AxisSpec{-tr.R, tr.R, {box[d].lo, box[d].hi}, {box[d]}, 8.0});
  const auto plan = detail::plan_slabs(axes, tr.eps, tr.T, true, opt);
  auto grad = [dim](const HalfSpaceField& f, const Point& x, double t, double* g) {
    const double h = 1e-4 * t;
    for (int d = 0; d < dim; ++d) {
      Point p = x, m = x;
      p[d] += h;
      m[d] -= h;
      g[d] = (f(p, t) - f(m, t)) / (2.0 * h);
    }
    g[dim] = (f(x, t + h) - f(x, t - h)) / (2.0 * h);
  };
  auto integrate = [&](const detail::Slab& s, detail::Envelope* env, std::size_t& pts) {
    double sum = 0.0;
    double gu[3], gv[3];
    const std::size_t P = s.grid.points();
    for (std::size_t it = 0; it < s.grid.t.size(); ++it)
      for (std::size_t ix = 0; ix < P; ++ix) {
        const Point x = s.grid.point(ix);
        const double t = s.grid.t[it];
        grad(u, x, t, gu);
        grad(v, x, t, gv);
        const double w = u1(x, t);
        double f = 0.0;
        for (int c = 0; c <= dim; ++c) f += gu[c] * gv[c];
        f *= w * w;
        sum += s.weight(it, ix) * f;
        if (env) env->add(x, t, f);
      }
    pts += P * s.grid.t.size();
    return sum;
  };
  QResult out;
  out.truncation = tr;
  detail::Envelope env{std::min(tr.R, tr.T), 0.0, dim};
  for (const auto& s : plan.slabs) out.value += integrate(s, &env, out.points);
  out.tail_bound = env.bound();
  std::size_t dummy = 0;
  for (const auto& sl : plan.strip) out.strip_estimate += integrate(sl, nullptr, dummy);
  return out;
}

struct GapIdentityReport {
  int star_index = 0;
  double gap = 0.0;  // lambda_* - lambda_1 from the eigensolver
  QResult q;         // Q(u_*/u_1, u_*/u_1)
  double relative_error = 0.0;
};

// Compares Q(u_*/u_1, u_*/u_1) with the Galerkin gap lambda_* - lambda_1.
inline GapIdentityReport gap_identity_check(const SpectralResult& r, std::optional<Truncation> trunc = std::nullopt,
                                            const QOptions& opt = {}) {
  detail::require_cauchy(r);
  if (!r.star_index) throw PreconditionError("no antisymmetric eigenfunction available");
  GapIdentityReport rep;
  rep.star_index = *r.star_index;
  rep.gap = r.lambda(rep.star_index) - r.lambda(1);
  rep.q = q_functional(r, rep.star_index, rep.star_index, trunc, opt);
  rep.relative_error = std::abs(rep.q.value - rep.gap) / rep.gap;
  return rep;
}

struct D01Report {
  int star_index = 0;
  double gap = 0.0;
  double integral = 0.0;        // over D x [eps, T]
  double strip_estimate = 0.0;  // first-order mass of D x (0, eps)
  bool bound_holds = false;     // integral + strip <= gap + 1e-3
  // Comparison u_1(x, t) >= exp(-lambda_1 t) phi_1(x) on the same grid.
  double r1_min_margin = std::numeric_limits<double>::infinity();
  std::size_t r1_violations = 0;
  double r1_violation_t_max = 0.0;     // largest t among violating nodes
  double r1_violation_depth_max = 0.0;  // largest distance to the boundary of D among them
  std::size_t grid_points = 0;
  double gradient_constant = 0.0;  // max t |grad(u_*/u_1)|
  double ratio_sup = 0.0;          // max |u_*/u_1|
};

// Evaluates int_0^T int_D |grad(u_*/u_1)|^2 phi_1^2 e^{-2 lambda_1 t} and the
// pointwise comparison behind it on one grid over D x [eps, T].
inline D01Report d01_lower_bound_check(const SpectralResult& r, std::optional<Truncation> trunc = std::nullopt,
                                       const QOptions& opt = {}, double r1_tol = 1e-8) {
  detail::require_cauchy(r);
  if (!r.star_index) throw PreconditionError("no antisymmetric eigenfunction available");
  const int dim = r.basis.domain.dim();
  const Truncation tr = trunc.value_or(default_truncation(dim));
  D01Report rep;
  rep.star_index = *r.star_index;
  rep.gap = r.lambda(rep.star_index) - r.lambda(1);
  const double l1 = r.lambda(1);
  const auto ev = make_mode_extension(r, {1, rep.star_index});

  const auto box = r.basis.domain.bounding_box();
  std::vector<detail::AxisSpec> axes;
  {
    auto full = detail::field_axes(r, 0.0, 0.0);
    for (int d = 0; d < dim; ++d) {
      full[d].lo = box[d].lo;
      full[d].hi = box[d].hi;
      const bool fold = detail::axis_parity(r, 1, d) != 0 && detail::axis_parity(r, rep.star_index, d) != 0;
      if (fold) full[d].lo = 0.0;
      axes.push_back(full[d]);
    }
  }
  double mult = 1.0;
  for (int d = 0; d < dim; ++d)
    if (axes[d].lo == 0.0 && box[d].lo < 0.0) mult *= 2.0;

  const auto plan = detail::plan_slabs(axes, tr.eps, tr.T, false, opt);
  const int C = dim + 1;
  struct Partial {
    double sum = 0.0, margin = std::numeric_limits<double>::infinity(), gconst = 0.0, ratio = 0.0;
    double vt = 0.0, vdepth = 0.0;
    std::size_t viol = 0, pts = 0;
  };
  auto integrate = [&](const detail::Slab& s, Partial& p) {
    FieldValues v;
    ev->evaluate(s.grid, v);
    const std::size_t P = s.grid.points();
    std::vector<double> phi1(P);
    std::vector<char> inside(P);
    std::vector<double> depth(P);
    for (std::size_t ix = 0; ix < P; ++ix) {
      const Point x = s.grid.point(ix);
      inside[ix] = r.basis.domain.contains(x);
      depth[ix] = detail::boundary_depth(r.basis.domain, x);
      phi1[ix] = inside[ix] ? eigenfunction_eval(r, 1, x) : 0.0;
    }
    for (std::size_t it = 0; it < s.grid.t.size(); ++it) {
      const double t = s.grid.t[it], decay = std::exp(-l1 * t);
      for (std::size_t ix = 0; ix < P; ++ix) {
        if (!inside[ix]) continue;
        const double u1 = v.u[v.at(0, it, ix)];
        const double margin = u1 - decay * phi1[ix];
        p.margin = std::min(p.margin, margin);
        if (margin < -r1_tol) {
          ++p.viol;
          p.vt = std::max(p.vt, t);
          p.vdepth = std::max(p.vdepth, depth[ix]);
        }
        if (!(u1 > 0.0)) throw NumericError("ground-state extension is not positive on the grid");
        const double w = v.u[v.at(1, it, ix)] / u1;
        const double* g1 = &v.grad[v.at(0, it, ix) * C];
        const double* gs = &v.grad[v.at(1, it, ix) * C];
        double g2 = 0.0;
        for (int c = 0; c < C; ++c) {
          const double gc = (gs[c] - w * g1[c]) / u1;
          g2 += gc * gc;
        }
        p.sum += s.weight(it, ix) * g2 * phi1[ix] * phi1[ix] * decay * decay;
        p.gconst = std::max(p.gconst, t * std::sqrt(g2));
        p.ratio = std::max(p.ratio, std::abs(w));
        ++p.pts;
      }
    }
  };
  std::vector<Partial> parts(plan.slabs.size());
  parallel_for(plan.slabs.size(), [&](std::size_t k) { integrate(plan.slabs[k], parts[k]); });
  for (const auto& p : parts) {
    rep.integral += mult * p.sum;
    rep.r1_min_margin = std::min(rep.r1_min_margin, p.margin);
    rep.r1_violations += p.viol;
    rep.r1_violation_t_max = std::max(rep.r1_violation_t_max, p.vt);
    rep.r1_violation_depth_max = std::max(rep.r1_violation_depth_max, p.vdepth);
    rep.grid_points += p.pts;
    rep.gradient_constant = std::max(rep.gradient_constant, p.gconst);
    rep.ratio_sup = std::max(rep.ratio_sup, p.ratio);
  }
  Partial strip;
  for (const auto& sl : plan.strip) integrate(sl, strip);
  rep.strip_estimate = mult * strip.sum;
  rep.bound_holds = rep.integral + rep.strip_estimate <= rep.gap + 1e-3;
  return rep;
}

}  // namespace fracspec
