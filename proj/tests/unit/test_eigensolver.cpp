#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "fracspec/eigensolver.hpp"

using namespace fracspec;
using std::numbers::pi;

namespace {

// Fourier transform of the normalized sine mode k of [c - a, c + a].
std::complex<double> sine_ft(int k, double a, double c, double xi) {
  const double kap = k * pi / (2.0 * a);
  double den = kap * kap - xi * xi;
  if (std::abs(den) < 1e-9) {
    xi += 1e-7;
    den = kap * kap - xi * xi;
  }
  const std::complex<double> I(0.0, 1.0);
  const std::complex<double> core =
      kap * (std::exp(I * xi * a) - (k % 2 ? -1.0 : 1.0) * std::exp(-I * xi * a)) / den / std::sqrt(a);
  return core * std::exp(-I * xi * c);
}

quad::Nodes half_line(double X, double panel) {
  std::vector<double> br{0.0};
  for (double h = 1e-4; h < panel; h *= 2.0) br.push_back(h);
  while (br.back() + panel < X) br.push_back(br.back() + panel);
  br.push_back(X);
  return quad::composite(br, 8);
}

// Direct 2D Fourier quadrature of one rectangle form entry on [-a,a] x [-b,b]
// for modes (i, j) and (k, l) of equal parities, with the leading strip tails.
double rect_entry_fourier(double alpha, double a, double b, int i, int j, int k, int l, double X) {
  const auto n1 = half_line(X, 0.25 * pi / a), n2 = half_line(X, 0.25 * pi / b);
  std::vector<double> P(n1.size()), Q(n2.size());
  for (std::size_t p = 0; p < n1.size(); ++p)
    P[p] = std::real(sine_ft(i, a, 0, n1.x[p]) * std::conj(sine_ft(k, a, 0, n1.x[p])));
  for (std::size_t q = 0; q < n2.size(); ++q)
    Q[q] = std::real(sine_ft(j, b, 0, n2.x[q]) * std::conj(sine_ft(l, b, 0, n2.x[q])));
  double sum = 0.0;
  for (std::size_t p = 0; p < n1.size(); ++p) {
    double row = 0.0;
    for (std::size_t q = 0; q < n2.size(); ++q)
      row += n2.w[q] * Q[q] * std::pow(n1.x[p] * n1.x[p] + n2.x[q] * n2.x[q], 0.5 * alpha);
    sum += n1.w[p] * P[p] * row;
  }
  auto tail = [&](int m1, int m2, double h) {
    const double k1 = m1 * pi / (2 * h), k2 = m2 * pi / (2 * h);
    return 2.0 * k1 * k2 / h * std::pow(X, alpha - 3.0) / (3.0 - alpha);
  };
  if (j == l) sum += tail(i, k, a) * pi;
  if (i == k) sum += tail(j, l, b) * pi;
  return 4.0 * sum / (4.0 * pi * pi);
}

}  // namespace

TEST(Basis, OrthonormalOnUnion) {
  const auto D = Domain::interval_union({{-3, -1}, {0.5, 2.0}});
  const auto b = make_basis(D, 9);
  EXPECT_EQ(b.offsets, (std::vector<int>{0, 5, 9}));
  std::vector<double> br{-3, -1, 0.5, 2};
  for (int j = 0; j < b.size; ++j)
    for (int k = 0; k < b.size; ++k) {
      double s = 0.0;
      for (std::size_t c = 0; c < 2; ++c) {
        const auto n = quad::composite(quad::uniform_breaks(br[2 * c], br[2 * c + 1], 8), 16);
        for (std::size_t p = 0; p < n.size(); ++p) s += n.w[p] * b.eval(j, Point{n.x[p]}) * b.eval(k, Point{n.x[p]});
      }
      EXPECT_NEAR(s, j == k ? 1.0 : 0.0, 1e-13);
    }
}

TEST(Basis, RectangleLayoutAndReflection) {
  const auto D = Domain::rectangle(-2, 2, -1, 1);
  const auto b = make_basis(D, 4);
  EXPECT_EQ(b.size, 16);
  const Point x{0.7, -0.3};
  for (int idx = 0; idx < b.size; ++idx) {
    const int i = idx / 4 + 1, j = idx % 4 + 1;
    EXPECT_NEAR(b.eval(idx, x),
                SpectralBasis::sine_1d(Interval{-2, 2}, i, 0.7) * SpectralBasis::sine_1d(Interval{-1, 1}, j, -0.3),
                1e-15);
    const auto [partner, sign] = b.reflection(idx);
    EXPECT_NEAR(b.eval(idx, reflect(x)), sign * b.eval(partner, x), 1e-14);
  }
  EXPECT_EQ(b.eval(0, Point{2.5, 0.0}), 0.0);
}

TEST(Basis, UnionReflectionSwapsComponents) {
  const auto b = make_basis(Domain::interval_union({{-3, -1}, {1, 3}}), 8);
  for (int idx = 0; idx < b.size; ++idx) {
    const auto [partner, sign] = b.reflection(idx);
    for (double x : {1.3, 2.2, 2.9}) EXPECT_NEAR(b.eval(idx, Point{-x}), sign * b.eval(partner, Point{x}), 1e-14);
  }
}

TEST(Basis, IntegralsAndSmallSize) {
  const auto b = make_basis(Domain::interval(-1, 2), 6);
  const auto n = quad::composite(quad::uniform_breaks(-1, 2, 8), 16);
  for (int k = 0; k < 6; ++k) {
    double s = 0.0;
    for (std::size_t p = 0; p < n.size(); ++p) s += n.w[p] * b.eval(k, Point{n.x[p]});
    EXPECT_NEAR(s, b.integral(k), 1e-13);
  }
  EXPECT_THROW(make_basis(Domain::interval(-1, 1), 1), ValidationError);
}

TEST(FormMatrix, AlphaTwoIsDiagonal) {
  const auto A = assemble_form_matrix(Domain::interval(-1, 1), 2.0, 16);
  for (int j = 0; j < 16; ++j)
    for (int k = 0; k < 16; ++k) EXPECT_NEAR(A(j, k), j == k ? std::pow((j + 1) * pi / 2, 2) : 0.0, 1e-10);
  const auto R = assemble_form_matrix(Domain::rectangle(-2, 2, -1, 1), 2.0, 5);
  for (int idx = 0; idx < 25; ++idx) {
    const int i = idx / 5 + 1, j = idx % 5 + 1;
    EXPECT_NEAR(R(idx, idx), std::pow(i * pi / 4, 2) + std::pow(j * pi / 2, 2), 1e-10);
  }
}

TEST(FormMatrix, ExactlySymmetric) {
  for (const auto& D : {Domain::interval(-1, 1), Domain::rectangle(-2, 2, -1, 1)}) {
    const auto A = assemble_form_matrix(D, 1.0, D.dim() == 1 ? 40 : 6);
    EXPECT_EQ((A - A.transpose()).cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(FormMatrix, HeatAndFourierRoutesAgree) {
  for (double alpha : {0.4, 1.0, 1.5}) {
    const auto F = reference_form_fourier(alpha, 24);
    const auto H = reference_form_heat(alpha, 24);
    EXPECT_LT((F - H).cwiseAbs().maxCoeff(), 1e-10 * F.cwiseAbs().maxCoeff()) << alpha;
  }
}

TEST(FormMatrix, ReferenceDiagonalMatchesDirectFourier) {
  // (1/2pi) int |xi| |F b_1|^2 on the reference interval, by adaptive quadrature.
  auto f = [](double xi) { return std::pow(xi, 1.0) * std::norm(sine_ft(1, 1.0, 0.0, xi)) / pi; };
  std::vector<double> br{0.0};
  for (int m = 1; m <= 2000; ++m) br.push_back(m * pi / 2);
  double v = quad::adaptive_breaks(f, br, 1e-14, 1e-13).value;
  // |F b_1|^2 averages 2 (pi/2)^2 / xi^4 beyond the last breakpoint.
  v += (pi / 2) * (pi / 2) / pi * std::pow(br.back(), -2.0);
  EXPECT_NEAR(reference_form(1.0, 8)(0, 0), v, 2e-7);
}

TEST(FormMatrix, RectangleEntriesMatchDirectFourier) {
  const auto D = Domain::rectangle(-2, 2, -1, 1);
  const auto A = assemble_form_matrix(D, 1.0, 4);
  auto at = [&](int i, int j) { return (i - 1) * 4 + (j - 1); };
  struct Case {
    int i, j, k, l;
  };
  for (const Case c : {Case{1, 1, 1, 1}, Case{1, 1, 3, 1}, Case{2, 1, 2, 3}, Case{2, 2, 4, 2}}) {
    const double ref = rect_entry_fourier(1.0, 2.0, 1.0, c.i, c.j, c.k, c.l, 400.0);
    EXPECT_NEAR(A(at(c.i, c.j), at(c.k, c.l)), ref, 2e-6 * std::max(1.0, std::abs(ref)))
        << c.i << c.j << c.k << c.l;
  }
}

TEST(FormMatrix, UnionCrossBlockMatchesFourier) {
  const auto D = Domain::interval_union({{-3, -1}, {1, 3}});
  const auto A = assemble_form_matrix(D, 1.0, 8);
  for (auto [j, k] : {std::pair{1, 1}, std::pair{1, 2}, std::pair{2, 3}}) {
    auto f = [&](double xi) {
      return std::real(sine_ft(j, 1.0, -2.0, xi) * std::conj(sine_ft(k, 1.0, 2.0, xi))) * xi / pi;
    };
    std::vector<double> br{0.0};
    for (int m = 1; m <= 4000; ++m) br.push_back(m * pi / 4);
    const double ref = quad::adaptive_breaks(f, br, 1e-14, 1e-12).value;
    EXPECT_NEAR(A(j - 1, 4 + k - 1), ref, 1e-6) << j << k;
  }
}

TEST(FormMatrix, ScalesExactly) {
  for (double alpha : {0.7, 1.0, 1.6}) {
    const auto A = assemble_form_matrix(Domain::interval(-1, 1), alpha, 12);
    const auto B = assemble_form_matrix(Domain::interval(-2.5, 2.5), alpha, 12);
    EXPECT_LT((B - std::pow(2.5, -alpha) * A).cwiseAbs().maxCoeff(), 1e-12 * A.cwiseAbs().maxCoeff());
  }
}

TEST(FormMatrix, DiskRequiresAlphaTwo) {
  EXPECT_THROW(assemble_form_matrix(Domain::disk(0, 0, 1), 1.0, 6), UnsupportedError);
  EXPECT_THROW(assemble_form_matrix(Domain::interval(-1, 1), 2.5, 6), DomainError);
}

TEST(Eigensolver, AlphaTwoExact) {
  const auto r = compute_spectrum(Domain::interval(-1, 1), 2.0, 24);
  for (int n = 1; n <= 24; ++n) EXPECT_NEAR(r.lambda(n), std::pow(n * pi / 2, 2), 1e-9);
  EXPECT_EQ(r.symmetry_labels[0], Symmetry::symmetric);
  EXPECT_EQ(r.symmetry_labels[1], Symmetry::antisymmetric);
}

TEST(Eigensolver, DiskAlphaTwoUsesBesselZeros) {
  const auto r = compute_spectrum(Domain::disk(0, 0, 2), 2.0, 6);
  const double j01 = bessel::zero(0, 1), j11 = bessel::zero(1, 1);
  EXPECT_NEAR(r.lambda(1), j01 * j01 / 4, 1e-10);
  EXPECT_NEAR(r.lambda(2), j11 * j11 / 4, 1e-10);
  EXPECT_NEAR(r.lambda(3), j11 * j11 / 4, 1e-10);
}

TEST(Eigensolver, CauchyIntervalConvergence) {
  // Ritz values, frozen from this solver; they decrease with N toward
  // 1.15777388 (lambda_1) and stay inside the bracket [pi/4, pi/2].
  const std::vector<std::pair<int, std::pair<double, double>>> frozen{
      {64, {1.160338233423, 2.760588367727}},
      {128, {1.159070589765, 2.757764401701}},
      {256, {1.158426413667, 2.756286392437}}};
  double prev1 = 1e9, prev2 = 1e9;
  for (const auto& [N, v] : frozen) {
    const auto r = compute_spectrum(Domain::interval(-1, 1), 1.0, N);
    EXPECT_NEAR(r.lambda(1), v.first, 1e-9) << N;
    EXPECT_NEAR(r.lambda(2), v.second, 1e-9) << N;
    EXPECT_LT(r.lambda(1), prev1);
    EXPECT_LT(r.lambda(2), prev2);
    prev1 = r.lambda(1);
    prev2 = r.lambda(2);
    EXPECT_GT(r.lambda(1), pi / 4);
    EXPECT_LT(r.lambda(1), pi / 2);
    ASSERT_TRUE(r.star_index.has_value());
    EXPECT_EQ(*r.star_index, 2);
  }
}

TEST(Eigensolver, ScalingLaw) {
  for (double alpha : {1.0, 1.5}) {
    const auto a = compute_spectrum(Domain::interval(-1, 1), alpha, 48);
    const auto b = compute_spectrum(Domain::interval(-3, 3), alpha, 48);
    EXPECT_NEAR(b.lambda(1) * std::pow(3.0, alpha), a.lambda(1), 1e-8 * a.lambda(1));
  }
}

TEST(Eigensolver, GroundStateProperties) {
  const auto r = compute_spectrum(Domain::interval(-1, 1), 1.0, 128);
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) EXPECT_GT(eigenfunction_eval(r, 1, Point{U(gen)}), 0.0);
  for (int i = 1; i < 1000; ++i) EXPECT_GT(eigenfunction_eval(r, 1, Point{-1.0 + 2.0 * i / 1000}), 0.0);
  const auto n = quad::composite(quad::uniform_breaks(-1, 1, 64), 16);
  double s = 0.0;
  for (std::size_t p = 0; p < n.size(); ++p) s += n.w[p] * std::pow(eigenfunction_eval(r, 1, Point{n.x[p]}), 2);
  EXPECT_NEAR(s, 1.0, 1e-8);
  EXPECT_EQ(eigenfunction_eval(r, 1, Point{1.5}), 0.0);
  EXPECT_THROW(eigenfunction_eval(r, 0, Point{0.0}), IndexError);
  EXPECT_THROW(r.lambda(129), IndexError);
  const Eigen::MatrixXd QtQ = r.coefficients.transpose() * r.coefficients;
  EXPECT_LT((QtQ - Eigen::MatrixXd::Identity(128, 128)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_GT(eigenfunction_eval(r, 2, positive_probe(r.basis.domain)), 0.0);
}

TEST(Eigensolver, ClassifySymmetryAgreesWithSplit) {
  const auto r = compute_spectrum(Domain::rectangle(-2, 2, -1, 1), 1.0, 10);
  const auto c = classify_symmetry(r);
  for (int n = 1; n <= 12; ++n) EXPECT_EQ(c.labels[n - 1], r.symmetry_labels[n - 1]) << n;
  ASSERT_TRUE(c.star_index.has_value());
  EXPECT_EQ(*c.star_index, *r.star_index);
  EXPECT_EQ(*c.star_index, 2);
  EXPECT_TRUE(c.star_sign_ok);
  EXPECT_GE(r.lambda(*r.star_index), r.lambda(2));
}

TEST(Eigensolver, NonSymmetricDomain) {
  const auto r = compute_spectrum(Domain::interval(0, 2), 1.0, 32);
  EXPECT_FALSE(r.star_index.has_value());
  EXPECT_THROW(classify_symmetry(r), PreconditionError);
  const auto s = compute_spectrum(Domain::interval(-1, 1), 1.0, 32);
  EXPECT_NEAR(r.lambda(1), s.lambda(1), 1e-12);
}

TEST(Eigensolver, RejectsAsymmetricMatrix) {
  const auto b = make_basis(Domain::interval(-1, 1), 4);
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(4, 4);
  A(0, 1) = 1e-3;
  EXPECT_THROW(solve_spectrum(A, b), ValidationError);
  EXPECT_THROW(solve_spectrum(Eigen::MatrixXd::Identity(3, 3), b), ValidationError);
}

TEST(Eigensolver, SymmetricUnionSpectrum) {
  const auto r = compute_spectrum(Domain::interval_union({{-3, -1}, {1, 3}}), 1.0, 64);
  ASSERT_TRUE(r.star_index.has_value());
  EXPECT_EQ(*r.star_index, 2);
  // Two well-separated unit-length copies: nearly degenerate pair above the
  // single-interval ground state.
  const auto s = compute_spectrum(Domain::interval(-1, 1), 1.0, 32);
  EXPECT_LT(r.lambda(1), s.lambda(1));
  EXPECT_LT(r.lambda(2) - r.lambda(1), 0.2);
}
