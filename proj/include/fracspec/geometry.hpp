#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <initializer_list>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fracspec/error.hpp"

namespace fracspec {

// A point of R^d, d <= 3.
struct Point {
  std::array<double, 3> c{};
  int dim = 1;

  Point() = default;
  Point(std::initializer_list<double> xs) : dim(static_cast<int>(xs.size())) {
    if (dim < 1 || dim > 3) throw DomainError("Point: dimension must be 1..3");
    std::copy(xs.begin(), xs.end(), c.begin());
  }
  static Point of_dim(int d) {
    Point p;
    p.dim = d;
    return p;
  }

  double& operator[](int i) { return c[i]; }
  double operator[](int i) const { return c[i]; }
  bool operator==(const Point& o) const { return dim == o.dim && c == o.c; }
};

inline double dist2(const Point& x, const Point& y) {
  double s = 0.0;
  for (int i = 0; i < x.dim; ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
  return s;
}

// x-hat: the mirror image across the hyperplane x1 = 0.
inline Point reflect(Point x) {
  x[0] = -x[0];
  return x;
}

struct Interval {
  double lo, hi;
  double center() const { return 0.5 * (lo + hi); }
  double half_width() const { return 0.5 * (hi - lo); }
  bool contains(double x) const { return x > lo && x < hi; }
  bool operator==(const Interval&) const = default;
};

struct IntervalUnion {
  std::vector<Interval> intervals;  // sorted, pairwise disjoint
};

struct Rectangle {
  Interval x, y;
};

struct Disk {
  double cx = 0.0, cy = 0.0, radius = 1.0;
};

struct GeometrySummary {
  double inradius = 0.0;
  double half_extent = 0.0;  // L = sup { x1 : x in D }
  double diameter = 0.0;
  bool symmetric_x1 = false;
  bool convex = false;
};

// Bounded open domain: a finite union of intervals, an axis-aligned
// rectangle, or a disk. Boundary points are outside.
class Domain {
 public:
  using Shape = std::variant<IntervalUnion, Rectangle, Disk>;

  static Domain interval(double lo, double hi) { return interval_union({{lo, hi}}); }

  static Domain interval_union(std::vector<Interval> parts) {
    if (parts.empty()) throw ValidationError("interval union must be nonempty");
    std::sort(parts.begin(), parts.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (!(parts[i].hi > parts[i].lo)) throw ValidationError("interval must be nonempty");
      if (i > 0 && parts[i].lo < parts[i - 1].hi)
        throw ValidationError("intervals must be pairwise disjoint");
    }
    return Domain(IntervalUnion{std::move(parts)});
  }

  static Domain rectangle(double x0, double x1, double y0, double y1) {
    if (!(x1 > x0) || !(y1 > y0)) throw ValidationError("rectangle sides must be positive");
    return Domain(Rectangle{{x0, x1}, {y0, y1}});
  }

  static Domain disk(double cx, double cy, double r) {
    if (!(r > 0.0)) throw ValidationError("disk radius must be positive");
    return Domain(Disk{cx, cy, r});
  }

  const Shape& shape() const { return shape_; }
  int dim() const { return std::holds_alternative<IntervalUnion>(shape_) ? 1 : 2; }

  std::string kind() const {
    return std::visit(
        [](const auto& s) -> std::string {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, IntervalUnion>) return "interval_union";
          else if constexpr (std::is_same_v<T, Rectangle>) return "rectangle";
          else return "disk";
        },
        shape_);
  }

  bool contains(const Point& p) const {
    return std::visit(
        [&](const auto& s) -> bool {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, IntervalUnion>) {
            for (const auto& iv : s.intervals)
              if (iv.contains(p[0])) return true;
            return false;
          } else if constexpr (std::is_same_v<T, Rectangle>) {
            return s.x.contains(p[0]) && s.y.contains(p[1]);
          } else {
            const double dx = p[0] - s.cx, dy = p[1] - s.cy;
            return dx * dx + dy * dy < s.radius * s.radius;
          }
        },
        shape_);
  }

  // Axis-aligned bounding box, one interval per coordinate.
  std::vector<Interval> bounding_box() const {
    return std::visit(
        [](const auto& s) -> std::vector<Interval> {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, IntervalUnion>)
            return {{s.intervals.front().lo, s.intervals.back().hi}};
          else if constexpr (std::is_same_v<T, Rectangle>)
            return {s.x, s.y};
          else
            return {{s.cx - s.radius, s.cx + s.radius}, {s.cy - s.radius, s.cy + s.radius}};
        },
        shape_);
  }

  bool operator==(const Domain& o) const { return kind() == o.kind() && bounding_box() == o.bounding_box() && same_parts(o); }

 private:
  explicit Domain(Shape s) : shape_(std::move(s)) {}

  bool same_parts(const Domain& o) const {
    if (auto* a = std::get_if<IntervalUnion>(&shape_))
      return a->intervals == std::get<IntervalUnion>(o.shape_).intervals;
    return true;
  }

  Shape shape_;
};

inline bool is_symmetric_x1(const Domain& d, double tol = 1e-12) {
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, IntervalUnion>) {
          const auto& iv = s.intervals;
          for (std::size_t i = 0; i < iv.size(); ++i) {
            const auto& m = iv[iv.size() - 1 - i];
            if (std::abs(iv[i].lo + m.hi) > tol || std::abs(iv[i].hi + m.lo) > tol) return false;
          }
          return true;
        } else if constexpr (std::is_same_v<T, Rectangle>) {
          return std::abs(s.x.lo + s.x.hi) <= tol;
        } else {
          return std::abs(s.cx) <= tol;
        }
      },
      d.shape());
}

inline GeometrySummary summarize(const Domain& d) {
  GeometrySummary g;
  g.symmetric_x1 = is_symmetric_x1(d);
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, IntervalUnion>) {
          for (const auto& iv : s.intervals) g.inradius = std::max(g.inradius, iv.half_width());
          g.half_extent = s.intervals.back().hi;
          g.diameter = s.intervals.back().hi - s.intervals.front().lo;
          g.convex = s.intervals.size() == 1;
        } else if constexpr (std::is_same_v<T, Rectangle>) {
          g.inradius = std::min(s.x.half_width(), s.y.half_width());
          g.half_extent = s.x.hi;
          g.diameter = std::hypot(s.x.hi - s.x.lo, s.y.hi - s.y.lo);
          g.convex = true;
        } else {
          g.inradius = s.radius;
          g.half_extent = s.cx + s.radius;
          g.diameter = 2.0 * s.radius;
          g.convex = true;
        }
      },
      d.shape());
  return g;
}

// Homothety about the origin.
inline Domain scale(const Domain& d, double k) {
  if (!(k > 0.0)) throw DomainError("scale: factor must be positive");
  return std::visit(
      [&](const auto& s) -> Domain {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, IntervalUnion>) {
          std::vector<Interval> parts;
          for (const auto& iv : s.intervals) parts.push_back({k * iv.lo, k * iv.hi});
          return Domain::interval_union(parts);
        } else if constexpr (std::is_same_v<T, Rectangle>) {
          return Domain::rectangle(k * s.x.lo, k * s.x.hi, k * s.y.lo, k * s.y.hi);
        } else {
          return Domain::disk(k * s.cx, k * s.cy, k * s.radius);
        }
      },
      d.shape());
}

// Lebesgue measure of D intersected with {x1 > 0} (sign > 0) or {x1 < 0}.
inline double half_measure(const Domain& d, int sign) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        auto clip = [&](Interval iv) {
          const double lo = sign > 0 ? std::max(iv.lo, 0.0) : iv.lo;
          const double hi = sign > 0 ? iv.hi : std::min(iv.hi, 0.0);
          return std::max(0.0, hi - lo);
        };
        if constexpr (std::is_same_v<T, IntervalUnion>) {
          double m = 0.0;
          for (const auto& iv : s.intervals) m += clip(iv);
          return m;
        } else if constexpr (std::is_same_v<T, Rectangle>) {
          return clip(s.x) * (s.y.hi - s.y.lo);
        } else {
          // Area of the disk part on one side of the line x1 = 0.
          const double r = s.radius, c = sign > 0 ? s.cx : -s.cx;
          const double h = std::clamp(c / r, -1.0, 1.0);  // signed offset of the center
          return r * r * (std::acos(-h) + h * std::sqrt(1.0 - h * h));
        }
      },
      d.shape());
}

// A fixed interior point of D+ used to normalize the sign of antisymmetric
// eigenfunctions.
inline Point positive_probe(const Domain& d) {
  return std::visit(
      [&](const auto& s) -> Point {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, IntervalUnion>) {
          for (const auto& iv : s.intervals) {
            const double lo = std::max(iv.lo, 0.0);
            if (iv.hi > lo) return Point{0.5 * (lo + iv.hi)};
          }
          return Point{s.intervals.back().center()};
        } else if constexpr (std::is_same_v<T, Rectangle>) {
          const double lo = std::max(s.x.lo, 0.0);
          return Point{0.5 * (lo + s.x.hi), s.y.center()};
        } else {
          return Point{s.cx + 0.5 * s.radius, s.cy};
        }
      },
      d.shape());
}

}  // namespace fracspec
