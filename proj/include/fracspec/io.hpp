#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "fracspec/eigensolver.hpp"
#include "fracspec/error.hpp"
#include "fracspec/geometry.hpp"
#include "fracspec/montecarlo.hpp"
#include "fracspec/report.hpp"
#include "fracspec/steklov.hpp"

namespace fracspec::io {

using json = nlohmann::ordered_json;

inline constexpr int kSchema = 1;

// Domain as {"kind": ..., "params": [...]}:
//   interval        [lo, hi]
//   interval_union  [lo_1, hi_1, lo_2, hi_2, ...]
//   rectangle       [x_lo, x_hi, y_lo, y_hi]
//   disk            [cx, cy, r]
inline json to_json(const Domain& D) {
  json params = json::array();
  std::string kind = D.kind();
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, IntervalUnion>) {
          if (s.intervals.size() == 1) kind = "interval";
          for (const auto& iv : s.intervals) {
            params.push_back(iv.lo);
            params.push_back(iv.hi);
          }
        } else if constexpr (std::is_same_v<T, Rectangle>) {
          params = {s.x.lo, s.x.hi, s.y.lo, s.y.hi};
        } else {
          params = {s.cx, s.cy, s.radius};
        }
      },
      D.shape());
  return json{{"kind", kind}, {"params", params}};
}

inline Domain domain_from_parts(const std::string& kind, const std::vector<double>& p) {
  auto need = [&](bool ok) {
    if (!ok) throw ValidationError("wrong number of parameters for domain kind '" + kind + "'");
  };
  if (kind == "interval") {
    need(p.size() == 2);
    return Domain::interval(p[0], p[1]);
  }
  if (kind == "interval_union" || kind == "union") {
    need(!p.empty() && p.size() % 2 == 0);
    std::vector<Interval> parts;
    for (std::size_t i = 0; i < p.size(); i += 2) parts.push_back({p[i], p[i + 1]});
    return Domain::interval_union(std::move(parts));
  }
  if (kind == "rectangle" || kind == "rect") {
    need(p.size() == 4);
    return Domain::rectangle(p[0], p[1], p[2], p[3]);
  }
  if (kind == "disk") {
    need(p.size() == 3);
    return Domain::disk(p[0], p[1], p[2]);
  }
  throw ValidationError("unknown domain kind '" + kind + "'");
}

inline Domain domain_from_json(const json& j) {
  try {
    return domain_from_parts(j.at("kind").get<std::string>(), j.at("params").get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed domain JSON: ") + e.what());
  }
}

// "interval:-1,1", "union:-3,-1,1,3", "rect:-2,2,-1,1", "disk:0,0,1", or a
// JSON object in the to_json layout.
inline Domain parse_domain(const std::string& text) {
  if (!text.empty() && text.front() == '{') {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw ValidationError(std::string("malformed domain JSON: ") + e.what());
    }
    return domain_from_json(j);
  }
  const auto colon = text.find(':');
  if (colon == std::string::npos || text.back() == ',') throw ValidationError("domain must look like kind:p1,p2,...");
  std::vector<double> p;
  std::stringstream ss(text.substr(colon + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw ValidationError("bad domain parameter '" + item + "'");
    p.push_back(v);
  }
  return domain_from_parts(text.substr(0, colon), p);
}

inline json to_json(const GeometrySummary& g) {
  return json{{"inradius", g.inradius},
              {"half_extent", g.half_extent},
              {"diameter", g.diameter},
              {"symmetric_x1", g.symmetric_x1},
              {"convex", g.convex}};
}

inline json to_json(const SpectralResult& r) {
  json labels = json::array();
  for (auto s : r.symmetry_labels) labels.push_back(to_string(s));
  json j{{"alpha", r.alpha},
         {"basis_size", r.basis.size},
         {"eigenvalues", std::vector<double>(r.eigenvalues.data(), r.eigenvalues.data() + r.eigenvalues.size())},
         {"symmetry", labels},
         {"star_index", r.star_index ? json(*r.star_index) : json(nullptr)},
         {"warnings", r.warnings}};
  return j;
}

inline json to_json(const QResult& q) {
  return json{{"value", q.value},
              {"truncation", {{"eps", q.truncation.eps}, {"T", q.truncation.T}, {"R", q.truncation.R}}},
              {"tail_bound", q.tail_bound},
              {"strip_estimate", q.strip_estimate}};
}

inline json to_json(const D01Report& d) {
  return json{{"star_index", d.star_index},
              {"gap", d.gap},
              {"integral", d.integral},
              {"strip_estimate", d.strip_estimate},
              {"bound_holds", d.bound_holds},
              {"r1_min_margin", d.r1_min_margin},
              {"r1_violations", d.r1_violations},
              {"r1_violation_t_max", d.r1_violation_t_max},
              {"r1_violation_depth_max", d.r1_violation_depth_max},
              {"grid_points", d.grid_points},
              {"gradient_constant", d.gradient_constant},
              {"ratio_sup", d.ratio_sup}};
}

inline json to_json(const McConfig& c) {
  return json{{"alpha", c.alpha}, {"paths", c.paths}, {"dt", c.dt},
              {"t_max", c.t_max}, {"seed", c.seed},   {"batches", c.batches}};
}

inline json to_json(const McEstimate& e) {
  return json{{"value", e.value},
              {"stderr", e.stderr},
              {"n_effective", e.n_effective},
              {"window", {e.window_lo, e.window_hi}}};
}

inline json to_json(const ReportEntry& e) {
  json j{{"name", e.name}, {"source", e.source}, {"relation", to_string(e.relation)}, {"bound", e.bound}};
  if (e.relation == Relation::within) j["upper"] = e.upper;
  j["computed"] = e.computed ? json(*e.computed) : json(nullptr);
  if (e.pass) j["pass"] = *e.pass;
  if (e.computed && e.relation != Relation::observe) j["slack"] = e.slack;
  return j;
}

inline json to_json(const BoundReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries) entries.push_back(to_json(e));
  return json{{"domain_kind", r.domain_kind}, {"dim", r.dim},         {"alpha", r.alpha},
              {"summary", to_json(r.summary)}, {"entries", entries}, {"assumptions", r.assumptions}};
}

// Round-trip precision, '.' decimal separator.
inline std::string csv_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string survival_csv(const SurvivalCurve& c) {
  std::string out = "t,survival,stderr\n";
  for (const auto& p : c.points)
    out += csv_number(p.t) + "," + csv_number(p.survival) + "," + csv_number(p.stderr) + "\n";
  return out;
}

// Two whitespace-separated columns per line.
inline std::string two_columns(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ValidationError("column lengths differ");
  std::string out;
  for (std::size_t i = 0; i < x.size(); ++i) out += csv_number(x[i]) + " " + csv_number(y[i]) + "\n";
  return out;
}

// Eigenfunctions 1..modes sampled on a grid of the bounding box, one row per point.
inline std::string eigenfunction_csv(const SpectralResult& r, int modes, int per_axis) {
  modes = std::min(modes, r.size());
  const auto box = r.basis.domain.bounding_box();
  const int dim = static_cast<int>(box.size());
  std::string out = dim == 1 ? "x" : "x,y";
  for (int n = 1; n <= modes; ++n) out += ",phi" + std::to_string(n);
  out += "\n";
  auto coord = [&](const Interval& iv, int i) { return iv.lo + (iv.hi - iv.lo) * i / (per_axis - 1); };
  const int rows = dim == 1 ? per_axis : per_axis * per_axis;
  for (int k = 0; k < rows; ++k) {
    Point x = dim == 1 ? Point{coord(box[0], k)} : Point{coord(box[0], k / per_axis), coord(box[1], k % per_axis)};
    out += csv_number(x[0]);
    if (dim == 2) out += "," + csv_number(x[1]);
    for (int n = 1; n <= modes; ++n) out += "," + csv_number(eigenfunction_eval(r, n, x));
    out += "\n";
  }
  return out;
}

// Writes to a sibling temporary file and renames it over the target.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ValidationError("cannot open " + tmp.string() + " for writing");
    f << content;
    f.flush();
    if (!f) throw ValidationError("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

inline void write_json(const std::filesystem::path& path, json j) {
  json out{{"schema", kSchema}};
  for (auto& [k, v] : j.items()) out[k] = std::move(v);
  write_atomic(path, out.dump(2) + "\n");
}

}  // namespace fracspec::io
