#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fracspec/bounds.hpp"
#include "fracspec/eigensolver.hpp"
#include "fracspec/io.hpp"
#include "fracspec/montecarlo.hpp"
#include "fracspec/report.hpp"
#include "fracspec/steklov.hpp"

using namespace fracspec;
using io::json;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 2;
constexpr int kNumeric = 3;

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw ValidationError("--alpha must lie in (0, 2]");
}

void emit(const std::string& out, const json& body) {
  if (out.empty() || out == "-") {
    json j{{"schema", io::kSchema}};
    for (const auto& [k, v] : body.items()) j[k] = v;
    std::cout << j.dump(2) << '\n';
  } else {
    io::write_json(out, body);
  }
}

Point parse_point(const std::string& text, int dim) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(std::stod(item));
  if (static_cast<int>(v.size()) != dim) throw ValidationError("point '" + text + "' has the wrong dimension");
  return dim == 1 ? Point{v[0]} : Point{v[0], v[1]};
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(std::stod(item));
  if (v.empty()) throw ValidationError("empty list '" + text + "'");
  return v;
}

std::vector<double> coords(const Point& x) { return std::vector<double>(x.c.begin(), x.c.begin() + x.dim); }

Point center_start(const Domain& D) {
  Point c = Point::of_dim(D.dim());
  const auto box = D.bounding_box();
  for (int i = 0; i < D.dim(); ++i) c[i] = box[i].center();
  return D.contains(c) ? c : positive_probe(D);
}

// eig ------------------------------------------------------------------------

struct EigArgs {
  std::string domain, out, csv;
  double alpha = 1.0;
  int n = 0, modes = 4, grid = 201;
};

int cmd_eig(EigArgs a) {
  require_alpha(a.alpha);
  const Domain D = io::parse_domain(a.domain);
  if (a.n == 0) a.n = D.dim() == 1 ? 512 : 48;
  const auto r = compute_spectrum(D, a.alpha, a.n);
  json config{{"command", "eig"},   {"domain", io::to_json(D)}, {"alpha", a.alpha}, {"n", a.n},
              {"out", a.out},       {"csv", a.csv},             {"modes", a.modes}, {"grid", a.grid}};
  if (!a.csv.empty()) io::write_atomic(a.csv, io::eigenfunction_csv(r, a.modes, a.grid));
  emit(a.out, json{{"config", config}, {"result", io::to_json(r)}});
  return kOk;
}

// gap-check ------------------------------------------------------------------

struct GapArgs {
  std::string domain, out;
  int n = 0;
  double eps = 0.0, T = 0.0, R = 0.0;
  bool d01 = true;
};

int cmd_gap_check(GapArgs a) {
  const Domain D = io::parse_domain(a.domain);
  if (a.n == 0) a.n = D.dim() == 1 ? 512 : 32;
  Truncation tr = default_truncation(D.dim());
  if (a.eps > 0.0) tr.eps = a.eps;
  if (a.T > 0.0) tr.T = a.T;
  if (a.R > 0.0) tr.R = a.R;
  if (!(tr.eps < tr.T)) throw ValidationError("truncation needs eps < T");
  const auto r = compute_spectrum(D, 1.0, a.n);
  const auto g = gap_identity_check(r, tr);
  const auto constant = q_functional(r, 1, 1, tr);
  json result{{"star_index", g.star_index},
              {"lambda_gap", g.gap},
              {"Q_value", g.q.value},
              {"relative_error", g.relative_error},
              {"Q", io::to_json(g.q)},
              {"constant_field_Q", constant.value},
              {"pass", g.relative_error < 0.02 && std::abs(constant.value) < 1e-8}};
  if (a.d01) {
    const auto d = d01_lower_bound_check(r, tr);
    result["d01_integral"] = d.integral;
    result["d01"] = io::to_json(d);
  }
  json config{{"command", "gap-check"},
              {"domain", io::to_json(D)},
              {"n", a.n},
              {"truncation", {{"eps", tr.eps}, {"T", tr.T}, {"R", tr.R}}},
              {"d01", a.d01},
              {"out", a.out}};
  emit(a.out, json{{"config", config}, {"result", result}});
  return kOk;
}

// mc -------------------------------------------------------------------------

struct McArgs {
  std::string domain, out, csv, start, gap_start;
  std::optional<std::uint64_t> seed;
  double alpha = 1.0, dt = 1e-3, t_max = 0.0, gap_t_max = 0.0;
  std::uint64_t paths = 0;
  int batches = 100, n = 0;
  bool refine = true;
};

json mc_run(const Domain& D, const McConfig& cfg, const Point& x, const std::optional<Point>& gx, double gap_t_max,
            const std::string& csv) {
  json run{{"dt", cfg.dt}};
  const auto curve = survival_curve(D, x, cfg);
  if (!csv.empty()) io::write_atomic(csv, io::survival_csv(curve));
  try {
    run["lambda1"] = io::to_json(estimate_lambda1(curve));
  } catch (const NumericError& e) {
    run["lambda1"] = json{{"error", e.what()}};
  }
  if (gx) {
    auto gc = cfg;
    gc.t_max = gap_t_max;
    try {
      run["gap_star"] = io::to_json(estimate_gap_star(D, *gx, gc));
    } catch (const NumericError& e) {
      run["gap_star"] = json{{"error", e.what()}};
    }
  }
  return run;
}

int cmd_mc(McArgs a) {
  if (!a.seed) throw ValidationError("mc requires --seed");
  require_alpha(a.alpha);
  const Domain D = io::parse_domain(a.domain);
  McConfig cfg;
  cfg.alpha = a.alpha;
  cfg.seed = *a.seed;
  cfg.dt = a.dt;
  cfg.batches = a.batches;
  cfg.paths = a.paths ? a.paths : (D.dim() == 1 ? 1000000 : 200000);
  cfg.t_max = a.t_max > 0.0 ? a.t_max : default_t_max(D, a.alpha);
  cfg.validate();
  const double gap_t_max = a.gap_t_max > 0.0 ? a.gap_t_max : 0.4 * cfg.t_max;
  const Point x = a.start.empty() ? center_start(D) : parse_point(a.start, D.dim());
  std::optional<Point> gx;
  if (is_symmetric_x1(D)) gx = a.gap_start.empty() ? positive_probe(D) : parse_point(a.gap_start, D.dim());

  json config{{"command", "mc"},
              {"domain", io::to_json(D)},
              {"mc", io::to_json(cfg)},
              {"start", coords(x)},
              {"gap_start", gx ? json(coords(*gx)) : json(nullptr)},
              {"gap_t_max", gap_t_max},
              {"refine", a.refine},
              {"n", a.n},
              {"out", a.out},
              {"csv", a.csv}};
  json runs = json::array();
  runs.push_back(mc_run(D, cfg, x, gx, gap_t_max, a.csv));
  if (a.refine) {
    auto half = cfg;
    half.dt = cfg.dt / 2.0;
    std::string csv2;
    if (!a.csv.empty()) {
      fs::path p(a.csv);
      csv2 = (p.parent_path() / (p.stem().string() + "_half_dt" + p.extension().string())).string();
    }
    runs.push_back(mc_run(D, half, x, gx, gap_t_max, csv2));
  }
  json body{{"config", config}, {"runs", runs}};

  // Galerkin values with z-scores, when the solver covers the domain.
  if (a.n > 0) {
    try {
      const auto r = compute_spectrum(D, a.alpha, a.n);
      json ref{{"lambda1", r.lambda(1)}};
      std::optional<double> gap;
      if (r.star_index) ref["gap_star"] = *(gap = r.lambda(*r.star_index) - r.lambda(1));
      for (auto& run : body["runs"]) {
        auto z = [&](const json& e, double v) {
          if (!e.contains("value") || e["stderr"].get<double>() <= 0.0) return json(nullptr);
          return json((e["value"].get<double>() - v) / e["stderr"].get<double>());
        };
        run["lambda1_z"] = z(run["lambda1"], r.lambda(1));
        if (gap && run.contains("gap_star")) run["gap_star_z"] = z(run["gap_star"], *gap);
      }
      body["galerkin"] = ref;
    } catch (const UnsupportedError& e) {
      body["galerkin"] = json{{"error", e.what()}};
    }
  }
  emit(a.out, body);
  return kOk;
}

// report ---------------------------------------------------------------------

struct ReportArgs {
  std::vector<std::string> domains;
  std::string out, text, plot_dir, mc_json, sweep;
  double alpha = 1.0;
  int n = 0;
};

std::optional<McEstimate> estimate_from(const json& j) {
  if (!j.contains("value")) return std::nullopt;
  McEstimate e;
  e.value = j["value"].get<double>();
  e.stderr = j["stderr"].get<double>();
  e.n_effective = j.value("n_effective", 0.0);
  if (j.contains("window")) {
    e.window_lo = j["window"][0].get<double>();
    e.window_hi = j["window"][1].get<double>();
  }
  return e;
}

int cmd_report(const ReportArgs& a) {
  require_alpha(a.alpha);
  std::vector<Domain> domains;
  for (const auto& s : a.domains) domains.push_back(io::parse_domain(s));
  std::vector<double> sweep;
  if (!a.sweep.empty()) sweep = parse_list(a.sweep);
  for (double L : sweep) {
    if (!(L > 0.0)) throw ValidationError("sweep lengths must be positive");
    domains.push_back(Domain::rectangle(-L, L, -1.0, 1.0));
  }

  std::optional<McSummary> mc;
  std::optional<Domain> mc_domain;
  if (!a.mc_json.empty()) {
    std::ifstream f(a.mc_json);
    if (!f) throw ValidationError("cannot read " + a.mc_json);
    json j;
    try {
      j = json::parse(f);
    } catch (const json::exception& e) {
      throw ValidationError(std::string("malformed Monte Carlo JSON: ") + e.what());
    }
    mc_domain = io::domain_from_json(j.at("config").at("domain"));
    const auto& run = j.at("runs").at(0);
    mc.emplace();
    if (run.contains("lambda1")) mc->lambda1 = estimate_from(run["lambda1"]);
    if (run.contains("gap_star")) mc->gap = estimate_from(run["gap_star"]);
  }

  json reports = json::array();
  std::string table;
  std::vector<double> xs, lower, upper, computed, computed_x;
  for (const auto& D : domains) {
    std::optional<SpectralResult> r;
    std::optional<double> ball_ratio;
    if (a.n > 0) {
      try {
        r = compute_spectrum(D, a.alpha, a.n);
        if (D.dim() == 1) {
          const auto ball = compute_spectrum(Domain::interval(-1.0, 1.0), a.alpha, a.n);
          ball_ratio = ball.lambda(2) / ball.lambda(1);
        }
      } catch (const UnsupportedError&) {
      }
    }
    ReportInputs in;
    if (r) in.spectral = &*r;
    in.ball_ratio = ball_ratio;
    if (mc && mc_domain && *mc_domain == D) in.mc = &*mc;
    const auto rep = build_report(D, a.alpha, in);
    reports.push_back(json{{"domain", io::to_json(D)}, {"report", io::to_json(rep)}});
    table += render_table(rep) + "\n";

    if (const auto* rc = std::get_if<Rectangle>(&D.shape()); rc && !sweep.empty()) {
      const double L = rc->x.half_width();
      if (const auto* lo = rep.find("gap lower bound (rectangle)")) {
        xs.push_back(L);
        lower.push_back(lo->bound);
        const auto* up = rep.find("gap upper bound");
        upper.push_back(up ? up->bound : std::nan(""));
        if (lo->computed) {
          computed_x.push_back(L);
          computed.push_back(*lo->computed);
        }
      }
    }
  }
  if (!a.plot_dir.empty() && !xs.empty()) {
    const fs::path dir(a.plot_dir);
    io::write_atomic(dir / "rect_gap_lower_vs_L.dat", io::two_columns(xs, lower));
    io::write_atomic(dir / "rect_gap_upper_vs_L.dat", io::two_columns(xs, upper));
    if (!computed.empty()) io::write_atomic(dir / "rect_gap_computed_vs_L.dat", io::two_columns(computed_x, computed));
  }
  if (!a.text.empty()) io::write_atomic(a.text, table);
  json config{{"command", "report"}, {"domains", a.domains}, {"sweep", sweep},     {"alpha", a.alpha},
              {"n", a.n},            {"mc_json", a.mc_json}, {"plot_dir", a.plot_dir}, {"out", a.out},
              {"text", a.text}};
  if (a.out.empty() || a.out == "-") {
    std::cout << table;
  } else {
    io::write_json(a.out, json{{"config", config}, {"reports", reports}});
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral gaps of fractional Laplacians: Galerkin eigenvalues, gap identities, Monte Carlo, bounds"};
  app.require_subcommand(1);

  EigArgs eig;
  auto* e = app.add_subcommand("eig", "Galerkin eigenvalues and symmetry labels");
  e->add_option("--domain", eig.domain, "interval:a,b | union:a1,b1,... | rect:x0,x1,y0,y1 | disk:cx,cy,r | JSON")
      ->required();
  e->add_option("--alpha", eig.alpha, "stability index in (0, 2]")->capture_default_str();
  e->add_option("--n", eig.n, "basis size (per axis in 2D); 0 picks 512 in 1D and 48 in 2D")->capture_default_str();
  e->add_option("--out", eig.out, "JSON output path (stdout when empty)");
  e->add_option("--csv", eig.csv, "eigenfunction dump path");
  e->add_option("--modes", eig.modes, "modes in the dump")->capture_default_str();
  e->add_option("--grid", eig.grid, "dump points per axis")->capture_default_str();

  GapArgs gap;
  auto* g = app.add_subcommand("gap-check", "variational gap identity and weighted-gradient bound (alpha = 1)");
  g->add_option("--domain", gap.domain, "domain string, as for eig")->required();
  g->add_option("--n", gap.n, "basis size; 0 picks 512 in 1D and 32 in 2D")->capture_default_str();
  g->add_option("--eps", gap.eps, "truncation eps (0 keeps the default)");
  g->add_option("--T", gap.T, "truncation height (0 keeps the default)");
  g->add_option("--R", gap.R, "truncation half-width (0 keeps the default)");
  g->add_flag("!--no-d01", gap.d01, "skip the weighted-gradient check");
  g->add_option("--out", gap.out, "JSON output path");

  McArgs mc;
  std::uint64_t seed = 0;
  auto* m = app.add_subcommand("mc", "Monte Carlo estimates of lambda_1 and lambda_* - lambda_1");
  m->add_option("--domain", mc.domain, "domain string, as for eig")->required();
  auto* seed_opt = m->add_option("--seed", seed, "random seed (required)");
  m->add_option("--alpha", mc.alpha, "stability index in (0, 2]")->capture_default_str();
  m->add_option("--paths", mc.paths, "paths per run; 0 picks 1e6 in 1D and 2e5 in 2D")->capture_default_str();
  m->add_option("--dt", mc.dt, "skeleton step")->capture_default_str();
  m->add_option("--t-max", mc.t_max, "horizon for lambda_1; 0 picks 15 / lambda prior");
  m->add_option("--gap-t-max", mc.gap_t_max, "horizon for the gap; 0 picks 0.4 t_max");
  m->add_option("--batches", mc.batches, "bootstrap batches")->capture_default_str();
  m->add_option("--start", mc.start, "start point for lambda_1, comma separated");
  m->add_option("--gap-start", mc.gap_start, "start point with x1 > 0 for the gap");
  m->add_flag("!--no-refine", mc.refine, "skip the dt/2 run");
  m->add_option("--n", mc.n, "Galerkin basis size for z-scores; 0 skips")->capture_default_str();
  m->add_option("--out", mc.out, "JSON output path");
  m->add_option("--csv", mc.csv, "survival curve CSV path");

  ReportArgs rep;
  auto* r = app.add_subcommand("report", "bounds report with optional computed values");
  r->add_option("--domain", rep.domains, "domain string (repeatable)");
  r->add_option("--rect-sweep", rep.sweep, "half-lengths L for rectangles [-L,L]x[-1,1], comma separated");
  r->add_option("--alpha", rep.alpha, "stability index")->capture_default_str();
  r->add_option("--n", rep.n, "Galerkin basis size; 0 gives a bounds-only report")->capture_default_str();
  r->add_option("--mc-json", rep.mc_json, "output of the mc command to include");
  r->add_option("--plot-dir", rep.plot_dir, "directory for two-column plot data");
  r->add_option("--text", rep.text, "text table output path");
  r->add_option("--out", rep.out, "JSON output path (table on stdout when empty)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::CallForAllHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError& ex) {
    app.exit(ex);
    return kValidation;
  }

  try {
    if (*e) return cmd_eig(eig);
    if (*g) return cmd_gap_check(gap);
    if (*m) {
      if (*seed_opt) mc.seed = seed;
      return cmd_mc(mc);
    }
    if (*r) return cmd_report(rep);
  } catch (const NumericError& ex) {
    std::cerr << "numeric failure: " << ex.what() << '\n';
    return kNumeric;
  } catch (const std::invalid_argument& ex) {
    std::cerr << "invalid input: " << ex.what() << '\n';
    return kValidation;
  } catch (const std::logic_error& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return kValidation;
  } catch (const std::exception& ex) {
    std::cerr << "failure: " << ex.what() << '\n';
    return kNumeric;
  }
  return kValidation;
}
