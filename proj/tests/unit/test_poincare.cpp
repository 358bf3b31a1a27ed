#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fracspec/poincare.hpp"

using namespace fracspec;
using std::numbers::pi;

namespace {

// Shooting oracle for (g f')' + q g f = 0 on (0, l), f(0) = 0, f'(0) = 1:
// returns f'(l) for the log-derivative dlog g.
double shoot(double q, double l, const std::function<double(double)>& dlog) {
  const int steps = 20000;
  const double h = l / steps;
  double f = 0.0, p = 1.0, x = 0.0;
  auto rhs = [&](double xx, double ff, double pp, double& df, double& dp) {
    df = pp;
    dp = -dlog(xx) * pp - q * ff;
  };
  for (int i = 0; i < steps; ++i) {
    double k1f, k1p, k2f, k2p, k3f, k3p, k4f, k4p;
    rhs(x, f, p, k1f, k1p);
    rhs(x + h / 2, f + h / 2 * k1f, p + h / 2 * k1p, k2f, k2p);
    rhs(x + h / 2, f + h / 2 * k2f, p + h / 2 * k2p, k3f, k3p);
    rhs(x + h, f + h * k3f, p + h * k3p, k4f, k4p);
    f += h / 6 * (k1f + 2 * k2f + 2 * k3f + k4f);
    p += h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p);
    x += h;
  }
  return p;
}

double first_shooting_root(double l, const std::function<double(double)>& dlog, double lo, double hi) {
  double flo = shoot(lo, l, dlog);
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi), fm = shoot(mid, l, dlog);
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double mass1d(double t, double x) { return (std::atan((1 - x) / t) - std::atan((-1 - x) / t)) / pi; }

double cauchy1(double t, double r) { return t / (pi * (t * t + r * r)); }

}  // namespace

TEST(LogConcave, Examples) {
  const auto gauss = make_profile([](double x) { return std::exp(-x * x); }, 1.0, 256);
  const auto bump = make_profile([](double x) { return 1.0 + x * x; }, 1.0, 256);
  const auto prod = make_profile([](double x) { return std::exp(-x * x) * std::cos(x); }, 1.0, 256);
  EXPECT_TRUE(is_log_concave(gauss));
  EXPECT_FALSE(is_log_concave(bump));
  EXPECT_TRUE(is_log_concave(prod));
  EXPECT_TRUE(gauss.symmetric);
  WeightProfile bad = gauss;
  bad.values[10] = 0.0;
  EXPECT_THROW(is_log_concave(bad), DomainError);
  EXPECT_THROW(make_profile([](double x) { return x; }, 1.0, 16), DomainError);
}

TEST(AntisymmetricQuotient, UniformWeightEqualityCase) {
  const auto w = make_profile([](double) { return 1.0; }, 1.0, 2048);
  const auto r = min_antisymmetric_quotient(w, 1.0);
  EXPECT_NEAR(r.quotient, pi * pi / 4, 1e-4);
  EXPECT_TRUE(r.pass);
  ASSERT_EQ(r.nodes.size(), r.minimizer.size());
  for (std::size_t i = 0; i < r.nodes.size(); ++i) EXPECT_NEAR(r.minimizer[i], std::sin(pi * r.nodes[i] / 2), 1e-6);
  const auto w2 = make_profile([](double) { return 1.0; }, 2.0, 2048);
  EXPECT_NEAR(min_antisymmetric_quotient(w2, 2.0).quotient, pi * pi / 16, 1e-5);
}

TEST(AntisymmetricQuotient, GaussianWeightMatchesShooting) {
  const auto w = make_profile([](double x) { return std::exp(-x * x); }, 1.0, 2048);
  const auto r = min_antisymmetric_quotient(w, 1.0);
  const double oracle = first_shooting_root(1.0, [](double x) { return -2 * x; }, 0.5, 8.0);
  EXPECT_NEAR(r.quotient, oracle, 1e-6);
  EXPECT_GT(r.quotient, pi * pi / 4);
}

TEST(AntisymmetricQuotient, GroundStateWeights) {
  for (double alpha : {1.0, 1.5, 2.0}) {
    const auto s = compute_spectrum(Domain::interval(-1, 1), alpha, 128);
    const auto r = min_antisymmetric_quotient(ground_state_profile(s), 1.0);
    EXPECT_TRUE(r.pass) << alpha << " " << r.quotient;
    EXPECT_GE(r.quotient, pi * pi / 4 - 1e-4);
  }
}

TEST(AntisymmetricQuotient, Preconditions) {
  EXPECT_THROW(min_antisymmetric_quotient(make_profile([](double) { return 1.0; }, 1.0, 8), 1.0), ValidationError);
  const auto skew = make_profile([](double x) { return 2.0 + x; }, 1.0, 64);
  EXPECT_FALSE(skew.symmetric);
  EXPECT_THROW(min_antisymmetric_quotient(skew, 1.0), PreconditionError);
  EXPECT_THROW(min_antisymmetric_quotient(make_profile([](double) { return 1.0; }, 1.0, 64), 2.0), ValidationError);
}

TEST(DirectionalQuotient, Examples) {
  const auto D = Domain::rectangle(-2, 2, -1, 1);
  const auto s = compute_spectrum(D, 1.0, 8);
  auto w = [&](const Point& x) {
    const double v = eigenfunction_eval(s, 1, x);
    return v * v;
  };
  const auto lin = directional_quotient_2d(D, w, [](const Point& x) { return x[0]; });
  EXPECT_TRUE(lin.pass);
  EXPECT_GT(lin.lhs, lin.rhs);
  const auto eq = directional_quotient_2d(D, [](const Point&) { return 1.0; },
                                          [](const Point& x) { return std::sin(pi * x[0] / 4); });
  EXPECT_NEAR(eq.lhs / eq.rhs, 1.0, 1e-6);
  EXPECT_NEAR(eq.lhs, pi * pi / 16 * 4, 1e-8);
  EXPECT_THROW(directional_quotient_2d(D, w, [](const Point&) { return 1.0; }), PreconditionError);
  EXPECT_THROW(directional_quotient_2d(Domain::rectangle(0, 2, -1, 1), w, [](const Point& x) { return x[0]; }),
               PreconditionError);
}

TEST(Skeleton, SingleTimeClosedForm) {
  const auto D = Domain::interval(-1, 1);
  EXPECT_NEAR(skeleton_survival(D, Point{0.0}, {1.0}), 0.5, 1e-15);
  const auto R = Domain::rectangle(-1, 1, -1, 1);
  // Corner formula at the centre of a square: 4 arctan(1 / sqrt 3) / (2 pi) = 1/3 at t = 1.
  EXPECT_NEAR(skeleton_survival(R, Point{0.0, 0.0}, {1.0}), 1.0 / 3.0, 1e-14);
}

TEST(Skeleton, TwoAndThreeTimesMatchNestedAdaptive) {
  const auto D = Domain::interval(-1, 1);
  const double x = 0.3;
  const double two = quad::adaptive_breaks([&](double y) { return cauchy1(0.2, x - y) * mass1d(0.3, y); },
                                           {-1.0, x, 1.0}, 1e-13, 1e-13).value;
  EXPECT_NEAR(skeleton_survival(D, Point{x}, {0.2, 0.5}), two, 1e-8);
  auto inner = [&](double y) {
    return quad::adaptive_breaks([&](double z) { return cauchy1(0.3, y - z) * mass1d(0.4, z); },
                                 {-1.0, y, 1.0}, 1e-12, 1e-12).value;
  };
  const double three = quad::adaptive_breaks([&](double y) { return cauchy1(0.5, x - y) * inner(y); },
                                             {-1.0, x, 1.0}, 1e-10, 1e-10).value;
  EXPECT_NEAR(skeleton_survival(D, Point{x}, {0.5, 0.8, 1.2}), three, 1e-7);
}

TEST(Skeleton, RectangleTwoTimes) {
  const auto D = Domain::rectangle(-2, 2, -1, 1);
  const Point x{0.5, 0.2};
  auto mass = [&](double t, double a, double b) {
    auto F = [&](double p, double q) { return std::atan(p * q / (t * std::sqrt(t * t + p * p + q * q))); };
    return (F(2 - a, 1 - b) - F(-2 - a, 1 - b) - F(2 - a, -1 - b) + F(-2 - a, -1 - b)) / (2 * pi);
  };
  const double oracle = quad::adaptive_breaks(
      [&](double a) {
        return quad::adaptive_breaks(
                   [&](double b) {
                     const double r2 = (a - x[0]) * (a - x[0]) + (b - x[1]) * (b - x[1]);
                     return 0.3 / (2 * pi * std::pow(0.09 + r2, 1.5)) * mass(0.4, a, b);
                   },
                   {-1.0, x[1], 1.0}, 1e-12, 1e-12)
            .value;
      },
      {-2.0, x[0], 2.0}, 1e-10, 1e-10).value;
  EXPECT_NEAR(skeleton_survival(D, x, {0.3, 0.7}, SkeletonGrid{8, 8}), oracle, 1e-7);
}

TEST(Skeleton, StructuralProperties) {
  const auto D = Domain::interval(-1, 1);
  for (double x : {0.0, 0.4, -0.8}) {
    EXPECT_LE(skeleton_survival(D, Point{x}, {0.5, 1.0}), skeleton_survival(D, Point{x}, {1.0}) + 1e-12);
    EXPECT_NEAR(skeleton_survival(D, Point{x}, {0.2, 0.6, 0.9}), skeleton_survival(D, Point{-x}, {0.2, 0.6, 0.9}),
                1e-12);
  }
  // Log-concave along the interval for n <= 3.
  std::vector<double> vals;
  for (int i = 1; i < 40; ++i) vals.push_back(skeleton_survival(D, Point{-1.0 + i / 20.0}, {0.3, 0.6, 1.0}));
  WeightProfile w;
  for (int i = 1; i < 40; ++i) w.grid.push_back(-1.0 + i / 20.0);
  w.values = vals;
  EXPECT_TRUE(is_log_concave(w, 1e-7));
  EXPECT_THROW(skeleton_survival(D, Point{0.0}, {1, 2, 3, 4, 5}), UnsupportedError);
  EXPECT_THROW(skeleton_survival(D, Point{1.5}, {1.0}), PreconditionError);
  EXPECT_THROW(skeleton_survival(D, Point{0.0}, {1.0, 0.5}), ValidationError);
  EXPECT_THROW(skeleton_survival(Domain::disk(0, 0, 1), Point{0.0, 0.0}, {1.0}), UnsupportedError);
}

TEST(Skeleton, RectangleLogConcaveAlongSegment) {
  const auto D = Domain::rectangle(-2, 2, -1, 1);
  WeightProfile w;
  for (int i = 1; i < 20; ++i) {
    w.grid.push_back(-2.0 + i / 5.0);
    w.values.push_back(skeleton_survival(D, Point{w.grid.back(), 0.3}, {0.4, 0.9}, SkeletonGrid{6, 6}));
  }
  EXPECT_TRUE(is_log_concave(w, 1e-7));
}

TEST(LemmaDerivative, ConstantAndZeroStart) {
  const double T = 60.0;
  std::vector<double> f(60001, 1.5);
  for (double c : {0.5, 1.0, 5.0}) {
    const auto r = check_lemma_derivative(f, T, c);
    EXPECT_NEAR(r.integral, 2.25 * (1 - std::exp(-c * T)) / c, 1e-10);
    EXPECT_TRUE(r.pass);
  }
  std::vector<double> g(20001);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::sin(20.0 * i / 20000.0);
  const auto r = check_lemma_derivative(g, 20.0, 1.0);
  EXPECT_EQ(r.bound, 0.0);
  EXPECT_TRUE(r.pass);
  EXPECT_THROW(check_lemma_derivative(f, T, 0.0), DomainError);
}

TEST(LemmaDerivative, ExtremalExponential) {
  // The minimiser of I under fixed f(0) is exp(r t), r = (c - sqrt(c^2 + 4)) / 2,
  // with I = 2 f(0)^2 / (sqrt(c^2 + 4) + c).
  for (double c : {0.5, 1.0, 5.0}) {
    const double rr = 0.5 * (c - std::sqrt(c * c + 4)), T = 40.0 / c;
    std::vector<double> f(static_cast<std::size_t>(T / 1e-3) + 1);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::exp(rr * T * i / (f.size() - 1));
    const auto r = check_lemma_derivative(f, T, c);
    EXPECT_NEAR(r.integral, 2.0 / (std::sqrt(c * c + 4) + c), 1e-6);
    EXPECT_GT(r.integral, r.bound);
  }
}

TEST(LemmaDerivative, RandomBandLimitedSuite) {
  const auto rep = lemma_derivative_suite({0.5, 1.0, 5.0}, 100, 7);
  EXPECT_EQ(rep.cases, 300);
  EXPECT_EQ(rep.violations, 0);
  EXPECT_GT(rep.worst_ratio, 1.0);
}
