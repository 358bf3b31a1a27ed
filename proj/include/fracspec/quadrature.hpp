#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>
#include <vector>

#include "fracspec/error.hpp"

namespace fracspec::quad {

// Nodes and weights on [-1, 1].
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre rule with n points, computed by Newton iteration on P_n and
// cached for the lifetime of the process.
inline const Rule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, Rule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  if (n < 1) throw DomainError("gauss_legendre: n must be positive");

  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    r.nodes[i] = -z;
    r.nodes[n - 1 - i] = z;
    const double w = 2.0 / ((1.0 - z * z) * pp * pp);
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  return cache.emplace(n, std::move(r)).first->second;
}

// Flattened quadrature on an interval built from panels.
struct Nodes {
  std::vector<double> x;
  std::vector<double> w;

  void append_panel(double a, double b, const Rule& rule) {
    const double h = 0.5 * (b - a), c = 0.5 * (a + b);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      x.push_back(c + h * rule.nodes[i]);
      w.push_back(h * rule.weights[i]);
    }
  }
  std::size_t size() const { return x.size(); }
};

// Composite rule over consecutive breakpoints.
inline Nodes composite(const std::vector<double>& breaks, int points_per_panel) {
  const Rule& rule = gauss_legendre(points_per_panel);
  Nodes out;
  out.x.reserve(breaks.size() * points_per_panel);
  out.w.reserve(breaks.size() * points_per_panel);
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (breaks[i + 1] > breaks[i]) out.append_panel(breaks[i], breaks[i + 1], rule);
  }
  return out;
}

inline std::vector<double> uniform_breaks(double a, double b, int panels) {
  std::vector<double> br(panels + 1);
  for (int i = 0; i <= panels; ++i) br[i] = a + (b - a) * i / panels;
  br.back() = b;
  return br;
}

// Sorted breakpoints on [lo, hi] refined geometrically (ratio 2) toward each
// focus point, starting at `finest` and never exceeding `coarsest` per panel.
inline std::vector<double> graded_breaks(double lo, double hi, const std::vector<double>& foci,
                                         double finest, double coarsest) {
  std::vector<double> br{lo, hi};
  for (double f : foci) {
    if (f < lo || f > hi) continue;
    br.push_back(f);
    for (double h = finest; h < hi - lo; h *= 2.0) {
      if (f - h > lo) br.push_back(f - h);
      if (f + h < hi) br.push_back(f + h);
    }
  }
  std::sort(br.begin(), br.end());
  std::vector<double> out;
  for (double b : br) {
    if (out.empty() || b - out.back() > 1e-14 * std::max(1.0, std::abs(b))) out.push_back(b);
  }
  std::vector<double> capped{out.front()};
  for (std::size_t i = 1; i < out.size(); ++i) {
    const double len = out[i] - out[i - 1];
    const int pieces = std::max(1, static_cast<int>(std::ceil(len / coarsest - 1e-12)));
    for (int k = 1; k < pieces; ++k) capped.push_back(out[i - 1] + len * k / pieces);
    capped.push_back(out[i]);
  }
  return capped;
}

struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

// Adaptive Gauss-Kronrod (7/15) with a global priority queue on the local
// error estimates.
inline Estimate adaptive(const std::function<double(double)>& f, double a, double b,
                         double abs_tol = 1e-12, double rel_tol = 1e-12,
                         int max_intervals = 20000) {
  static constexpr double xgk[8] = {
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
  static constexpr double wgk[8] = {
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static constexpr double wg[4] = {
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

  struct Piece {
    double a, b, value, error;
    bool operator<(const Piece& o) const { return error < o.error; }
  };
  auto gk = [&](double lo, double hi) {
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    const double fc = f(c);
    double rk = fc * wgk[7], rg = fc * wg[3];
    for (int j = 0; j < 7; ++j) {
      const double dx = h * xgk[j];
      const double s = f(c - dx) + f(c + dx);
      rk += wgk[j] * s;
      if (j % 2 == 1) rg += wg[j / 2] * s;
    }
    return Piece{lo, hi, rk * h, std::abs((rk - rg) * h)};
  };

  std::priority_queue<Piece> heap;
  Piece first = gk(a, b);
  heap.push(first);
  double total = first.value, err = first.error;
  int count = 1;
  while (err > std::max(abs_tol, rel_tol * std::abs(total)) && count < max_intervals) {
    Piece p = heap.top();
    heap.pop();
    const double m = 0.5 * (p.a + p.b);
    if (m <= p.a || m >= p.b) {
      heap.push(Piece{p.a, p.b, p.value, 0.0});
      err -= p.error;
      continue;
    }
    Piece l = gk(p.a, m), r = gk(m, p.b);
    total += l.value + r.value - p.value;
    err += l.error + r.error - p.error;
    heap.push(l);
    heap.push(r);
    ++count;
  }
  // Re-sum to avoid drift from the incremental updates.
  double sum = 0.0, esum = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    esum += heap.top().error;
    heap.pop();
  }
  return {sum, esum};
}

// Adaptive integration over consecutive breakpoints.
inline Estimate adaptive_breaks(const std::function<double(double)>& f,
                                const std::vector<double>& breaks, double abs_tol = 1e-12,
                                double rel_tol = 1e-12) {
  Estimate out;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (breaks[i + 1] <= breaks[i]) continue;
    const Estimate e = adaptive(f, breaks[i], breaks[i + 1], abs_tol, rel_tol);
    out.value += e.value;
    out.error += e.error;
  }
  return out;
}

}  // namespace fracspec::quad
