#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fracspec/bounds.hpp"
#include "fracspec/eigensolver.hpp"
#include "fracspec/geometry.hpp"
#include "fracspec/montecarlo.hpp"
#include "fracspec/steklov.hpp"

namespace fracspec {

enum class Relation { le, ge, within, observe };

inline std::string to_string(Relation r) {
  switch (r) {
    case Relation::le: return "<=";
    case Relation::ge: return ">=";
    case Relation::within: return "in";
    case Relation::observe: return "obs";
  }
  return "?";
}

// One row: `computed relation bound`, or bound <= computed <= upper for
// Relation::within. pass is set only when a computed value exists.
struct ReportEntry {
  std::string name;
  std::string source;
  Relation relation = Relation::le;
  double bound = 0.0;
  double upper = 0.0;
  std::optional<double> computed;
  std::optional<bool> pass;
  double slack = 0.0;
};

struct BoundReport {
  GeometrySummary summary;
  std::string domain_kind;
  int dim = 1;
  double alpha = 1.0;
  std::vector<ReportEntry> entries;
  std::vector<std::string> assumptions;

  bool all_pass() const {
    for (const auto& e : entries)
      if (e.pass && !*e.pass) return false;
    return true;
  }
  const ReportEntry* find(const std::string& name) const {
    for (const auto& e : entries)
      if (e.name == name) return &e;
    return nullptr;
  }
};

struct McSummary {
  std::optional<McEstimate> lambda1;
  std::optional<McEstimate> gap;
  double sigmas = 3.0;
};

struct ReportInputs {
  const SpectralResult* spectral = nullptr;
  const McSummary* mc = nullptr;
  const D01Report* d01 = nullptr;
  std::optional<double> ball_ratio;  // lambda_2 / lambda_1 of the ball of the same dimension
};

namespace detail {

inline void settle(ReportEntry& e) {
  if (!e.computed) return;
  const double c = *e.computed;
  switch (e.relation) {
    case Relation::le: e.slack = e.bound - c; break;
    case Relation::ge: e.slack = c - e.bound; break;
    case Relation::within: e.slack = std::min(c - e.bound, e.upper - c); break;
    case Relation::observe: e.slack = 0.0; return;
  }
  e.pass = e.slack >= 0.0;
}

inline ReportEntry row(std::string name, std::string source, Relation rel, double bound,
                       std::optional<double> computed, double upper = 0.0) {
  ReportEntry e{std::move(name), std::move(source), rel, bound, upper, computed, std::nullopt, 0.0};
  settle(e);
  return e;
}

inline bool single_interval(const Domain& D) {
  const auto* u = std::get_if<IntervalUnion>(&D.shape());
  return u && u->intervals.size() == 1;
}

}  // namespace detail

// Collects every bound that applies to D and compares it with whichever
// computed values are supplied.
inline BoundReport build_report(const Domain& D, double alpha, const ReportInputs& in = {}) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("alpha must lie in (0, 2]");
  if (in.spectral && std::abs(in.spectral->alpha - alpha) > 1e-12)
    throw ValidationError("spectral result was computed for a different alpha");
  BoundReport rep;
  rep.summary = summarize(D);
  rep.domain_kind = D.kind();
  rep.dim = D.dim();
  rep.alpha = alpha;
  const int d = rep.dim;
  const double r = rep.summary.inradius, L = rep.summary.half_extent;
  const bool cauchy = std::abs(alpha - 1.0) < 1e-12;
  const bool convex_sym = rep.summary.convex && rep.summary.symmetric_x1;

  std::optional<double> l1, l2, gap_star;
  if (in.spectral) {
    l1 = in.spectral->lambda(1);
    if (in.spectral->size() >= 2) l2 = in.spectral->lambda(2);
    if (in.spectral->star_index) gap_star = in.spectral->lambda(*in.spectral->star_index) - *l1;
  }
  std::optional<double> gap21 = (l1 && l2) ? std::optional<double>(*l2 - *l1) : std::nullopt;
  // Bound rows for lambda_* - lambda_1 fall back to the Monte Carlo estimate.
  std::optional<double> gap_any = gap_star;
  if (!gap_any && in.mc && in.mc->gap) gap_any = in.mc->gap->value;

  const bool is_ball = detail::single_interval(D) || D.kind() == "disk";
  if (is_ball && alpha < 2.0) {
    const auto mu = bounds::dirichlet_ball_eigs(d, r);
    const auto b1 = bounds::bracket_lambda(mu.mu1, alpha), b2 = bounds::bracket_lambda(mu.mu2, alpha);
    rep.entries.push_back(detail::row("lambda1 bracket", "subordination bracket by Dirichlet-Laplacian eigenvalues",
                                      Relation::within, b1.first, l1, b1.second));
    rep.entries.push_back(detail::row("lambda2 bracket", "subordination bracket by Dirichlet-Laplacian eigenvalues",
                                      Relation::within, b2.first, l2, b2.second));
  }
  if (alpha < 2.0) {
    rep.entries.push_back(detail::row("gap upper bound", "ball comparison via Bessel zeros and inradius", Relation::le,
                                      bounds::gap_upper(d, r, alpha), gap21));
  }
  if (cauchy && convex_sym) {
    rep.assumptions.push_back("lower bounds on lambda_* - lambda_1 assume alpha = 1 and a convex domain symmetric in x1");
    rep.entries.push_back(detail::row("gap lower bound (main)", "convex symmetric domains, constants C_d and C'_d",
                                      Relation::ge, bounds::gap_lower_main(d, L, r), gap_any));
    if (l1) {
      // Scale to unit inradius, where the bound is stated, and back.
      const double b = bounds::final_inequality(r * *l1, L / r) / r;
      rep.entries.push_back(detail::row("gap lower bound (lambda1 form)", "bound in terms of lambda_1 before the ball estimate",
                                        Relation::ge, b, gap_any));
    }
    if (const auto* rc = std::get_if<Rectangle>(&D.shape())) {
      const double h = rc->y.half_width(), Lx = rc->x.half_width();
      if (h <= Lx)
        rep.entries.push_back(detail::row("gap lower bound (rectangle)", "explicit rectangle constants min(2/(5L^2), 1/6)",
                                          Relation::ge, bounds::rectangle_gap_lower(Lx / h) / h, gap_any));
    }
    if (D.kind() == "disk")
      rep.entries.push_back(detail::row("gap lower bound (disk)", "disk bound 1/(6r)", Relation::ge,
                                        bounds::disk_gap_lower(r), gap_any));
  }
  if (in.d01) {
    const auto& q = *in.d01;
    rep.entries.push_back(detail::row("weighted gradient integral", "simplified energy bound on lambda_* - lambda_1",
                                      Relation::le, q.gap + 1e-3, q.integral + q.strip_estimate));
    rep.entries.push_back(detail::row("semigroup weight comparison", "u_1 >= exp(-lambda_1 t) phi_1 on the grid (min margin)",
                                      Relation::ge, 0.0, q.r1_min_margin));
  }
  if (in.mc) {
    const double k = in.mc->sigmas;
    auto mc_row = [&](const char* name, const McEstimate& e, std::optional<double> ref) {
      if (!ref) return;
      rep.entries.push_back(detail::row(name, "Monte Carlo estimate within k standard errors of the Galerkin value",
                                        Relation::within, e.value - k * e.stderr, *ref, e.value + k * e.stderr));
    };
    if (in.mc->lambda1) mc_row("Monte Carlo lambda1", *in.mc->lambda1, l1);
    if (in.mc->gap) mc_row("Monte Carlo lambda_* - lambda1", *in.mc->gap, gap_star);
  }
  if (l1 && l2 && in.ball_ratio) {
    rep.entries.push_back(detail::row("PPW ratio lambda2/lambda1", "recorded against the ball ratio, not asserted",
                                      Relation::observe, *in.ball_ratio, *l2 / *l1));
  }
  return rep;
}

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Fixed-width text table, one line per entry.
inline std::string render_table(const BoundReport& rep) {
  std::vector<std::vector<std::string>> rows{{"entry", "rel", "bound", "computed", "slack", "pass"}};
  for (const auto& e : rep.entries) {
    std::string bound = format_number(e.bound);
    if (e.relation == Relation::within) bound = "[" + bound + ", " + format_number(e.upper) + "]";
    rows.push_back({e.name, to_string(e.relation), bound, e.computed ? format_number(*e.computed) : "-",
                    e.computed && e.relation != Relation::observe ? format_number(e.slack) : "-",
                    e.pass ? (*e.pass ? "yes" : "NO") : "-"});
  }
  std::vector<std::size_t> width(rows[0].size(), 0);
  for (const auto& r : rows)
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
  std::ostringstream out;
  out << rep.domain_kind << " (d = " << rep.dim << ", alpha = " << format_number(rep.alpha)
      << ", inradius = " << format_number(rep.summary.inradius)
      << ", L = " << format_number(rep.summary.half_extent) << ")\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c < rows[i].size(); ++c) {
      out << rows[i][c];
      if (c + 1 < rows[i].size()) out << std::string(width[c] - rows[i][c].size() + 2, ' ');
    }
    out << '\n';
  }
  for (const auto& a : rep.assumptions) out << "assumes: " << a << '\n';
  return out.str();
}

}  // namespace fracspec
