#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "fracspec/basis.hpp"
#include "fracspec/error.hpp"
#include "fracspec/form_matrix.hpp"
#include "fracspec/geometry.hpp"

namespace fracspec {

enum class Symmetry { symmetric, antisymmetric, none };

inline std::string to_string(Symmetry s) {
  switch (s) {
    case Symmetry::symmetric: return "symmetric";
    case Symmetry::antisymmetric: return "antisymmetric";
    default: return "none";
  }
}

// Eigenpairs of the Galerkin problem. Column n-1 of `coefficients` holds
// the basis coefficients of mode n (modes are 1-based throughout).
struct SpectralResult {
  SpectralBasis basis;
  double alpha = 1.0;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd coefficients;
  std::vector<Symmetry> symmetry_labels;
  std::optional<int> star_index;
  std::vector<std::string> warnings;

  int size() const { return static_cast<int>(eigenvalues.size()); }
  double lambda(int n) const {
    if (n < 1 || n > size()) throw IndexError("mode index out of range");
    return eigenvalues[n - 1];
  }
};

namespace detail {

// Orthonormal bases of the +1 and -1 eigenspaces of the basis reflection,
// or nullopt when the domain or basis is not reflection-symmetric.
inline std::optional<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>> reflection_split(const SpectralBasis& b) {
  if (!is_symmetric_x1(b.domain)) return std::nullopt;
  const int N = b.size;
  std::vector<std::pair<int, double>> map(N);
  for (int i = 0; i < N; ++i) {
    map[i] = b.reflection(i);
    if (map[i].first < 0 || map[i].first >= N) return std::nullopt;
  }
  for (int i = 0; i < N; ++i) {
    const auto [j, s] = map[i];
    if (map[j].first != i || map[j].second != s) return std::nullopt;
  }
  std::vector<Eigen::VectorXd> plus, minus;
  for (int i = 0; i < N; ++i) {
    const auto [j, s] = map[i];
    if (j < i) continue;
    if (j == i) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(N);
      e[i] = 1.0;
      (s > 0 ? plus : minus).push_back(e);
    } else {
      Eigen::VectorXd p = Eigen::VectorXd::Zero(N), m = Eigen::VectorXd::Zero(N);
      p[i] = m[i] = std::sqrt(0.5);
      p[j] = s * std::sqrt(0.5);
      m[j] = -s * std::sqrt(0.5);
      plus.push_back(p);
      minus.push_back(m);
    }
  }
  auto stack = [N](const std::vector<Eigen::VectorXd>& v) {
    Eigen::MatrixXd Q(N, static_cast<Eigen::Index>(v.size()));
    for (std::size_t c = 0; c < v.size(); ++c) Q.col(static_cast<Eigen::Index>(c)) = v[c];
    return Q;
  };
  return std::make_pair(stack(plus), stack(minus));
}

inline double eval_coefficients(const SpectralBasis& b, const double* c, const Point& x) {
  if (!b.domain.contains(x)) return 0.0;
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, IntervalUnion>) {
          for (std::size_t k = 0; k < s.intervals.size(); ++k) {
            const Interval& iv = s.intervals[k];
            if (!iv.contains(x[0])) continue;
            const double th = sine_frequency(1) * (x[0] - iv.lo) / iv.half_width();
            return clenshaw_sine(c + b.offsets[k], b.component_modes(k), th) / std::sqrt(iv.half_width());
          }
          return 0.0;
        } else if constexpr (std::is_same_v<T, Rectangle>) {
          std::vector<double> sx(b.nx), sy(b.ny);
          sine_table(sine_frequency(1) * (x[0] - s.x.lo) / s.x.half_width(), b.nx, sx.data());
          sine_table(sine_frequency(1) * (x[1] - s.y.lo) / s.y.half_width(), b.ny, sy.data());
          double v = 0.0;
          for (int i = 0; i < b.nx; ++i) {
            double row = 0.0;
            for (int j = 0; j < b.ny; ++j) row += c[i * b.ny + j] * sy[j];
            v += sx[i] * row;
          }
          return v / std::sqrt(s.x.half_width() * s.y.half_width());
        } else {
          double v = 0.0;
          for (int k = 0; k < b.size; ++k)
            if (c[k] != 0.0) v += c[k] * b.eval(k, x);
          return v;
        }
      },
      b.domain.shape());
}

// Points of D+ (x1 > 0) on a regular lattice, for symmetry probes.
inline std::vector<Point> half_probe_grid(const Domain& D, int per_axis) {
  std::vector<Point> pts;
  const auto box = D.bounding_box();
  const double hi = box[0].hi;
  if (hi <= 0.0) return pts;
  for (int i = 0; i < per_axis; ++i) {
    const double x1 = hi * (i + 0.5) / per_axis;
    if (D.dim() == 1) {
      Point p{x1};
      if (D.contains(p)) pts.push_back(p);
    } else {
      for (int j = 0; j < per_axis; ++j) {
        const double x2 = box[1].lo + (box[1].hi - box[1].lo) * (j + 0.5) / per_axis;
        Point p{x1, x2};
        if (D.contains(p)) pts.push_back(p);
      }
    }
  }
  return pts;
}

}  // namespace detail

// phi_n(x) for the Galerkin eigenfunction n (1-based); zero outside D.
inline double eigenfunction_eval(const SpectralResult& r, int n, const Point& x) {
  if (n < 1 || n > r.size()) throw IndexError("eigenfunction_eval: mode index out of range");
  return detail::eval_coefficients(r.basis, r.coefficients.col(n - 1).data(), x);
}

struct SymmetryClassification {
  std::vector<Symmetry> labels;
  std::optional<int> star_index;
  bool star_sign_ok = false;  // phi_* > 0 on D+ probes and < 0 on D-
  std::vector<std::string> warnings;
};

// Labels each mode by comparing phi(x^) with +-phi(x) on a probe grid of D+.
inline SymmetryClassification classify_symmetry(const SpectralResult& r, double tol = 1e-8) {
  SymmetryClassification out;
  const int N = r.size();
  out.labels.assign(N, Symmetry::none);
  if (!is_symmetric_x1(r.basis.domain)) {
    throw PreconditionError("classify_symmetry requires a domain symmetric in x1");
  }
  const auto probes = detail::half_probe_grid(r.basis.domain, r.basis.domain.dim() == 1 ? 200 : 24);
  for (int n = 1; n <= N; ++n) {
    double sup = 0.0, anti = 0.0, sym = 0.0;
    for (const auto& p : probes) {
      const double a = eigenfunction_eval(r, n, p), b = eigenfunction_eval(r, n, reflect(p));
      sup = std::max({sup, std::abs(a), std::abs(b)});
      anti = std::max(anti, std::abs(a + b));
      sym = std::max(sym, std::abs(a - b));
    }
    if (anti < tol * sup) out.labels[n - 1] = Symmetry::antisymmetric;
    else if (sym < tol * sup) out.labels[n - 1] = Symmetry::symmetric;
  }
  for (int n = 1; n <= N; ++n)
    if (out.labels[n - 1] == Symmetry::antisymmetric) {
      out.star_index = n;
      break;
    }
  if (!out.star_index) {
    out.warnings.push_back("no antisymmetric mode among the computed modes");
    return out;
  }
  bool ok = true;
  for (const auto& p : probes) {
    const double v = eigenfunction_eval(r, *out.star_index, p);
    ok = ok && v > 0.0 && eigenfunction_eval(r, *out.star_index, reflect(p)) < 0.0;
  }
  out.star_sign_ok = ok;
  return out;
}

// Dense symmetric eigensolve of the Galerkin matrix (the Gram matrix is the
// identity). On reflection-symmetric domains the problem splits into the
// even and odd subspaces, which are solved separately and merged.
inline SpectralResult solve_spectrum(const Eigen::MatrixXd& A, const SpectralBasis& basis, double alpha = 1.0) {
  const Eigen::Index N = A.rows();
  if (A.cols() != N || N != basis.size) throw ValidationError("form matrix does not match the basis");
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw ValidationError("form matrix is not symmetric");

  SpectralResult r;
  r.basis = basis;
  r.alpha = alpha;
  std::vector<double> vals;
  std::vector<Eigen::VectorXd> vecs;
  std::vector<Symmetry> parity;
  auto solve_block = [&](const Eigen::MatrixXd& Q, Symmetry label) {
    if (Q.cols() == 0) return;
    const Eigen::MatrixXd B = Q.transpose() * A * Q;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (B + B.transpose()));
    if (es.info() != Eigen::Success) throw NumericError("symmetric eigensolver failed");
    for (Eigen::Index k = 0; k < B.rows(); ++k) {
      vals.push_back(es.eigenvalues()[k]);
      vecs.push_back(Q * es.eigenvectors().col(k));
      parity.push_back(label);
    }
  };
  if (auto split = detail::reflection_split(basis)) {
    solve_block(split->first, Symmetry::symmetric);
    solve_block(split->second, Symmetry::antisymmetric);
  } else {
    solve_block(Eigen::MatrixXd::Identity(N, N), Symmetry::none);
  }
  std::vector<int> order(vals.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return vals[a] < vals[b]; });

  r.eigenvalues.resize(N);
  r.coefficients.resize(N, N);
  r.symmetry_labels.resize(N);
  const Point probe = positive_probe(basis.domain);
  for (Eigen::Index k = 0; k < N; ++k) {
    const int o = order[k];
    r.eigenvalues[k] = vals[o];
    Eigen::VectorXd v = vecs[o];
    double ref;
    if (k == 0) {
      ref = 0.0;
      for (Eigen::Index i = 0; i < N; ++i) ref += v[i] * basis.integral(static_cast<int>(i));
    } else if (parity[o] == Symmetry::antisymmetric) {
      ref = detail::eval_coefficients(basis, v.data(), probe);
    } else {
      ref = 0.0;
    }
    if (std::abs(ref) < 1e-12) {
      Eigen::Index imax;
      v.cwiseAbs().maxCoeff(&imax);
      ref = v[imax];
    }
    if (ref < 0.0) v = -v;
    r.coefficients.col(k) = v;
    r.symmetry_labels[k] = parity[o];
  }
  if (r.eigenvalues[0] <= 0.0) throw NumericError("ground eigenvalue is not positive");
  if (is_symmetric_x1(basis.domain)) {
    for (Eigen::Index k = 0; k < N; ++k)
      if (r.symmetry_labels[k] == Symmetry::antisymmetric) {
        r.star_index = static_cast<int>(k) + 1;
        break;
      }
    if (!r.star_index) r.warnings.push_back("no antisymmetric mode among the computed modes");
  }
  return r;
}

// Convenience: basis, assembly and solve in one call.
inline SpectralResult compute_spectrum(const Domain& D, double alpha, int n, const FormOptions& opt = {}) {
  const SpectralBasis b = make_basis(D, n);
  return solve_spectrum(assemble_form_matrix(b, alpha, opt), b, alpha);
}

}  // namespace fracspec
