#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "fracspec/bounds.hpp"
#include "fracspec/error.hpp"
#include "fracspec/geometry.hpp"
#include "fracspec/kernels.hpp"
#include "fracspec/parallel.hpp"
#include "fracspec/rng.hpp"

namespace fracspec {

struct McConfig {
  double alpha = 1.0;
  std::uint64_t paths = 1000000;
  double dt = 1e-3;
  double t_max = 10.0;
  std::uint64_t seed = 0;
  int batches = 100;  // independent path groups, the resampling unit of the bootstrap

  void validate() const {
    if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("alpha must lie in (0, 2]");
    if (paths < 1) throw ValidationError("paths must be at least 1");
    if (!(dt > 0.0 && dt < t_max)) throw ValidationError("need 0 < dt < t_max");
    if (batches < 1) throw ValidationError("batches must be at least 1");
  }
  int steps() const { return static_cast<int>(std::floor(t_max / dt + 1e-9)); }
};

struct McEstimate {
  double value = 0.0;
  double stderr = 0.0;
  double n_effective = 0.0;  // paths alive at the start of the measurement window
  double window_lo = 0.0, window_hi = 0.0;
};

struct SurvivalPoint {
  double t = 0.0;
  double survival = 1.0;
  double stderr = 0.0;
};

struct SurvivalCurve {
  std::vector<SurvivalPoint> points;  // t = k dt, k = 0..steps
  std::uint64_t paths = 0;
  double dt = 0.0;
};

// Signed survival ratio r(t) = [P(X_t in D+, tau > t) - P(X_t in D-, tau > t)] / P(tau > t).
struct SignedRatioCurve {
  std::vector<double> t, ratio, stderr;
};

struct WindowOptions {
  double bin = 0.25;          // spacing of the fitting grid
  double variation = 0.0;     // admissible relative deviation of the head fit
  double noise_sigmas = 2.0;  // plus this many standard errors of the comparison
  double probe = 0.5;         // length of the head fit compared with the tail
  double settle = 0.5;        // extra time skipped after the first consistent start
  double max_rel_se = 0.1;    // last usable time: relative error of the signal below this
  int bootstrap = 200;
};

namespace detail {

struct Tally {
  int steps = 0, batches = 0;
  std::vector<std::uint64_t> paths;                 // per batch
  std::vector<std::uint64_t> alive, plus, minus;    // batch-major, steps + 1 per batch
  std::uint64_t at(const std::vector<std::uint64_t>& v, int b, int k) const { return v[std::size_t(b) * (steps + 1) + k]; }
};

inline Tally simulate(const Domain& D, const Point& x, const McConfig& cfg, bool signs) {
  cfg.validate();
  if (!D.contains(x)) throw PreconditionError("start point must lie in D");
  const int d = D.dim(), steps = cfg.steps(), B = cfg.batches;
  const std::uint64_t P = cfg.paths;
  Tally t;
  t.steps = steps;
  t.batches = B;
  t.paths.resize(B);
  const std::size_t len = std::size_t(steps) + 1;
  t.alive.assign(B * len, 0);
  if (signs) {
    t.plus.assign(B * len, 0);
    t.minus.assign(B * len, 0);
  }
  const double beta = 0.5 * cfg.alpha;
  parallel_for(B, [&](std::size_t b) {
    const std::uint64_t lo = P * b / B, hi = P * (b + 1) / B;
    t.paths[b] = hi - lo;
    std::vector<std::uint64_t> deaths(len + 1, 0);
    std::uint64_t* plus = signs ? t.plus.data() + b * len : nullptr;
    std::uint64_t* minus = signs ? t.minus.data() + b * len : nullptr;
    for (std::uint64_t i = lo; i < hi; ++i) {
      CounterRng rng(cfg.seed, i);
      Point p = x;
      int k = 1;
      for (; k <= steps; ++k) {
        const double s = beta < 1.0 ? sample_subordinator_increment(cfg.dt, beta, rng) : cfg.dt;
        const double scale = std::sqrt(2.0 * s);
        for (int j = 0; j < d; ++j) p[j] += scale * rng.normal();
        if (!D.contains(p)) break;
        if (signs) {
          if (p[0] > 0.0) ++plus[k];
          else if (p[0] < 0.0) ++minus[k];
        }
      }
      ++deaths[k];  // k = steps + 1 means alive at the horizon
    }
    std::uint64_t alive = hi - lo;
    std::uint64_t* out = t.alive.data() + b * len;
    for (std::size_t k = 0; k < len; ++k) {
      alive -= deaths[k];
      out[k] = alive;
    }
    if (signs) {
      plus[0] = x[0] > 0.0 ? hi - lo : 0;
      minus[0] = x[0] < 0.0 ? hi - lo : 0;
    }
  });
  return t;
}

struct Fit {
  double value = 0.0, se = 0.0;
};

// Window [t_a, t_m] on a grid t_0 < ... < t_m; fit(a, b) is the rate fitted
// over [t_a, t_b]. A start a is accepted when the fit over the next
// `probe` time units agrees with the fit over the rest of the curve; one
// comparison per start keeps the false-rejection rate at the nominal level.
// The window then starts `settle` later, since a transient hidden in the
// noise of the head still accumulates over the whole fit.
template <class FitFn>
int select_window(const std::vector<double>& t, int last, const WindowOptions& opt, FitFn&& fit) {
  for (int a = 0; a + 2 <= last; ++a) {
    int h = a + 1;
    while (h < last && t[h] < t[a] + opt.probe - 1e-12) ++h;
    if (h + 1 > last) break;
    const Fit head = fit(a, h), tail = fit(h, last);
    if (!std::isfinite(head.value) || !std::isfinite(tail.value)) continue;
    if (std::abs(head.value - tail.value) >
        opt.variation * std::abs(tail.value) + opt.noise_sigmas * std::hypot(head.se, tail.se))
      continue;
    int start = a;
    while (start + 2 < last && t[start] < t[a] + opt.settle - 1e-12) ++start;
    return start;
  }
  throw NumericError("no regression window with a stable rate");
}

}  // namespace detail

// Killed survival curve from the discrete skeleton: a path dies at the first
// multiple of dt at which it lies outside D.
inline SurvivalCurve survival_curve(const Domain& D, const Point& x, const McConfig& cfg) {
  const auto tally = detail::simulate(D, x, cfg, false);
  SurvivalCurve c;
  c.paths = cfg.paths;
  c.dt = cfg.dt;
  const double n = static_cast<double>(cfg.paths);
  for (int k = 0; k <= tally.steps; ++k) {
    std::uint64_t alive = 0;
    for (int b = 0; b < tally.batches; ++b) alive += tally.at(tally.alive, b, k);
    const double s = alive / n;
    c.points.push_back({k * cfg.dt, s, std::sqrt(s * (1.0 - s) / n)});
  }
  return c;
}

// lambda_1 as the slope of -log survival. The fit is generalized least
// squares under the multinomial covariance of nested survival events,
// Cov(log S_i, log S_j) = (1/S_i - 1)/n for t_i <= t_j, which makes the
// increments between bin edges independent.
inline McEstimate estimate_lambda1(const SurvivalCurve& c, const WindowOptions& opt = {}) {
  const double n = static_cast<double>(c.paths);
  const int stride = std::max(1, static_cast<int>(std::lround(opt.bin / c.dt)));
  std::vector<int> idx;
  for (std::size_t k = 0; k < c.points.size(); k += stride) {
    if (c.points[k].survival * n < 1.0 / (opt.max_rel_se * opt.max_rel_se)) break;
    if (!idx.empty() && c.points[k].survival >= c.points[idx.back()].survival) continue;
    idx.push_back(static_cast<int>(k));
  }
  if (idx.size() < 3) throw NumericError("survival curve has fewer than three usable bins (need >= 100 survivors)");
  const int m = static_cast<int>(idx.size()) - 1;
  auto S = [&](int i) { return c.points[idx[i]].survival; };
  auto T = [&](int i) { return c.points[idx[i]].t; };
  std::vector<double> tt(m + 1), slope(m + 1, 0.0), w(m + 1, 0.0);
  for (int k = 0; k <= m; ++k) tt[k] = T(k);
  for (int k = 1; k <= m; ++k) {
    const double dt = T(k) - T(k - 1), var = (1.0 / S(k) - 1.0 / S(k - 1)) / n;
    slope[k] = (std::log(S(k - 1)) - std::log(S(k))) / dt;
    w[k] = dt * dt / var;
  }
  auto fit = [&](int a, int b) {
    double num = 0.0, den = 0.0;
    for (int k = a + 1; k <= b; ++k) {
      num += w[k] * slope[k];
      den += w[k];
    }
    return detail::Fit{num / den, 1.0 / std::sqrt(den)};
  };
  const int a = detail::select_window(tt, m, opt, fit);
  const auto f = fit(a, m);
  McEstimate e;
  e.value = f.value;
  e.stderr = f.se;
  e.n_effective = S(a) * n;
  e.window_lo = T(a);
  e.window_hi = T(m);
  return e;
}

// e^{lambda t} P_x(tau > t), which tends to phi_1(x) times the common
// normalization. The plateau test compares with the same quantity at 3t/4.
inline McEstimate estimate_phi1(const Domain& D, const Point& x, double t, double lambda1, McConfig cfg) {
  if (!(t > 0.0)) throw DomainError("measurement time must be positive");
  cfg.t_max = t;
  const auto c = survival_curve(D, x, cfg);
  const auto& end = c.points.back();
  const auto& mid = c.points[static_cast<std::size_t>(std::lround(0.75 * t / cfg.dt))];
  const double g = std::exp(lambda1 * end.t) * end.survival, se = std::exp(lambda1 * end.t) * end.stderr;
  const double gm = std::exp(lambda1 * mid.t) * mid.survival, sem = std::exp(lambda1 * mid.t) * mid.stderr;
  if (end.survival * cfg.paths < 100.0) throw NumericError("fewer than 100 survivors at the measurement time");
  if (std::abs(g - gm) > 0.05 * g + 3.0 * std::hypot(se, sem))
    throw NumericError("e^{lambda t} P(tau > t) has not reached its plateau");
  McEstimate e;
  e.value = g;
  e.stderr = se;
  e.n_effective = end.survival * cfg.paths;
  e.window_lo = e.window_hi = end.t;
  return e;
}

namespace detail {

struct RatioSeries {
  std::vector<double> t;
  std::vector<std::vector<double>> batch_signed, batch_alive;  // [time][batch]
  double ratio(std::size_t i, const std::vector<int>& pick) const {
    double s = 0.0, a = 0.0;
    for (int b : pick) {
      s += batch_signed[i][b];
      a += batch_alive[i][b];
    }
    return a > 0.0 ? s / a : 0.0;
  }
};

inline RatioSeries signed_series(const Domain& D, const Point& x, const McConfig& cfg, int stride) {
  const auto tally = simulate(D, x, cfg, true);
  RatioSeries r;
  for (int k = 0; k <= tally.steps; k += stride) {
    r.t.push_back(k * cfg.dt);
    std::vector<double> s(tally.batches), a(tally.batches);
    for (int b = 0; b < tally.batches; ++b) {
      s[b] = double(tally.at(tally.plus, b, k)) - double(tally.at(tally.minus, b, k));
      a[b] = double(tally.at(tally.alive, b, k));
    }
    r.batch_signed.push_back(std::move(s));
    r.batch_alive.push_back(std::move(a));
  }
  return r;
}

inline std::vector<std::vector<int>> bootstrap_picks(int batches, int resamples, std::uint64_t seed) {
  CounterRng rng(seed, 0xB007u);
  std::vector<std::vector<int>> picks(resamples, std::vector<int>(batches));
  for (auto& p : picks)
    for (auto& v : p) v = std::min(batches - 1, static_cast<int>(rng.uniform() * batches));
  return picks;
}

}  // namespace detail

// r(t) on a grid of spacing `bin` with batch-bootstrap standard errors.
inline SignedRatioCurve signed_survival_ratio(const Domain& D, const Point& x, const McConfig& cfg,
                                              const WindowOptions& opt = {}) {
  const int stride = std::max(1, static_cast<int>(std::lround(opt.bin / cfg.dt)));
  const auto s = detail::signed_series(D, x, cfg, stride);
  std::vector<int> all(cfg.batches);
  for (int b = 0; b < cfg.batches; ++b) all[b] = b;
  const auto picks = detail::bootstrap_picks(cfg.batches, opt.bootstrap, cfg.seed);
  SignedRatioCurve out;
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    double m = 0.0, q = 0.0;
    for (const auto& p : picks) {
      const double v = s.ratio(i, p);
      m += v;
      q += v * v;
    }
    m /= picks.size();
    out.t.push_back(s.t[i]);
    out.ratio.push_back(s.ratio(i, all));
    out.stderr.push_back(std::sqrt(std::max(0.0, q / picks.size() - m * m)));
  }
  return out;
}

// lambda_* - lambda_1 as the decay rate of r(t), fitted by least squares on
// log r over an automatically selected window; the standard error comes
// from refitting on bootstrap resamples of the path batches.
inline McEstimate estimate_gap_star(const Domain& D, const Point& x, const McConfig& cfg,
                                    const WindowOptions& opt = {}) {
  if (!is_symmetric_x1(D)) throw PreconditionError("domain must be symmetric in x1");
  if (!D.contains(x) || !(x[0] > 0.0)) throw PreconditionError("start point must lie in D with x1 > 0");
  cfg.validate();
  const int stride = std::max(1, static_cast<int>(std::lround(opt.bin / cfg.dt)));
  const auto s = detail::signed_series(D, x, cfg, stride);
  std::vector<int> all(cfg.batches);
  for (int b = 0; b < cfg.batches; ++b) all[b] = b;
  const auto picks = detail::bootstrap_picks(cfg.batches, opt.bootstrap, cfg.seed);
  const std::size_t nt = s.t.size();

  // Log-ratio per time for the full sample and for every resample.
  std::vector<double> y(nt);
  std::vector<std::vector<double>> yb(picks.size(), std::vector<double>(nt));
  int last = -1;
  for (std::size_t i = 1; i < nt; ++i) {
    const double r = s.ratio(i, all);
    if (!(r > 0.0)) break;
    double m = 0.0, q = 0.0;
    bool positive = true;
    for (std::size_t p = 0; p < picks.size(); ++p) {
      const double rb = s.ratio(i, picks[p]);
      positive = positive && rb > 0.0;
      yb[p][i] = rb > 0.0 ? -std::log(rb) : 0.0;
      m += rb;
      q += rb * rb;
    }
    m /= picks.size();
    const double se = std::sqrt(std::max(0.0, q / picks.size() - m * m));
    if (!positive || se > opt.max_rel_se * r) break;
    y[i] = -std::log(r);
    last = static_cast<int>(i);
  }
  if (last < 3) throw NumericError("signed survival ratio is lost in noise (r(t) <= 0 or too uncertain)");

  // Least-squares rate over grid points a..b; its error from the bootstrap
  // replicates.
  auto ols = [&](const std::vector<double>& v, int a, int b) {
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    const int n = b - a + 1;
    for (int i = a; i <= b; ++i) {
      st += s.t[i];
      sy += v[i];
      stt += s.t[i] * s.t[i];
      sty += s.t[i] * v[i];
    }
    return (n * sty - st * sy) / (n * stt - st * st);
  };
  auto spread = [&](auto&& stat) {
    double m = 0.0, q = 0.0;
    for (const auto& b : yb) {
      const double v = stat(b);
      m += v;
      q += v * v;
    }
    m /= yb.size();
    return std::sqrt(std::max(0.0, q / yb.size() - m * m));
  };
  // Index 0 (t = 0) is excluded: the window grid is t_1, ..., t_last.
  const int m = last - 1;
  std::vector<double> tt(m + 1);
  for (int k = 0; k <= m; ++k) tt[k] = s.t[k + 1];
  auto fit = [&](int a, int b) {
    if (b - a < 1) return detail::Fit{std::numeric_limits<double>::quiet_NaN(), 0.0};
    return detail::Fit{ols(y, a + 1, b + 1), spread([&](const std::vector<double>& v) { return ols(v, a + 1, b + 1); })};
  };
  const int a = detail::select_window(tt, m, opt, fit);
  const auto f = fit(a, m);
  McEstimate e;
  e.value = f.value;
  e.stderr = f.se;
  double alive = 0.0;
  for (int b : all) alive += s.batch_alive[a + 1][b];
  e.n_effective = alive;
  e.window_lo = s.t[a + 1];
  e.window_hi = s.t[last];
  return e;
}

// Horizon 15 / lambda_prior, with the prior the upper bracket of lambda_1 for
// the inscribed ball (an upper bound for lambda_1(D) by domain monotonicity).
inline double default_t_max(const Domain& D, double alpha) {
  const auto g = summarize(D);
  const double prior = std::pow(bounds::dirichlet_ball_eigs(D.dim(), g.inradius).mu1, alpha / 2.0);
  return 15.0 / prior;
}

// Time to equilibrium bracket log(1/eps)/gap <= T_eps <= C1 + log(1/eps)/gap.
inline std::pair<double, double> time_to_equilibrium_bounds(double gap, double eps, double C1) {
  if (!(gap > 0.0)) throw DomainError("gap must be positive");
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
  const double lo = std::log(1.0 / eps) / gap;
  return {lo, C1 + lo};
}

}  // namespace fracspec
