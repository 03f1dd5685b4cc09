#include "drsafe/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "drsafe/error.hpp"

namespace drsafe::numerics {

SymMatrix::SymMatrix(const Eigen::MatrixXd& lower) {
  if (lower.rows() != lower.cols() || lower.rows() < 1) {
    throw Error(ErrorCode::DimensionMismatch, "SymMatrix needs a non-empty square matrix");
  }
  entries_ = lower.triangularView<Eigen::Lower>();
  entries_.triangularView<Eigen::StrictlyUpper>() = entries_.transpose();
}

SymMatrix SymMatrix::identity(Eigen::Index dim) {
  return SymMatrix(Eigen::MatrixXd::Identity(dim, dim));
}

SymMatrix SymMatrix::diagonal(const Eigen::VectorXd& d) {
  return SymMatrix(Eigen::MatrixXd(d.asDiagonal()));
}

SymMatrix SymMatrix::symmetrized(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "symmetrized needs a square matrix");
  }
  return SymMatrix(Eigen::MatrixXd(0.5 * (a + a.transpose())));
}

namespace {

// In-place lower Cholesky; returns nullopt on the first pivot <= tol.
std::optional<Eigen::MatrixXd> cholesky_lower(const SymMatrix& a, double tol) {
  const Eigen::Index n = a.dim();
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = a(j, j);
    for (Eigen::Index k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
    if (!(pivot > tol)) return std::nullopt;
    const double d = std::sqrt(pivot);
    l(j, j) = d;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / d;
    }
  }
  return l;
}

}  // namespace

EigenDecomposition jacobi_eigen(const SymMatrix& a, int max_sweeps) {
  const Eigen::Index n = a.dim();
  Eigen::MatrixXd m = a.matrix();
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double scale = std::max(m.norm(), std::numeric_limits<double>::min());

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += m(p, q) * m(p, q);
    if (std::sqrt(off) <= 1e-16 * scale) break;

    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = m(p, q);
        if (apq == 0.0) continue;
        // Rotation angle that zeroes m(p,q) (Rutishauser's formulation).
        const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double mkp = m(k, p);
          const double mkq = m(k, q);
          m(k, p) = c * mkp - s * mkq;
          m(k, q) = s * mkp + c * mkq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double mpk = m(p, k);
          const double mqk = m(q, k);
          m(p, k) = c * mpk - s * mqk;
          m(q, k) = s * mpk + c * mqk;
        }
        m(p, q) = 0.0;
        m(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index i, Eigen::Index j) { return m(i, i) < m(j, j); });
  EigenDecomposition out{Eigen::VectorXd(n), Eigen::MatrixXd(n, n)};
  for (Eigen::Index j = 0; j < n; ++j) {
    out.values(j) = m(order[j], order[j]);
    out.vectors.col(j) = v.col(order[j]);
  }
  return out;
}

bool is_positive_definite(const SymMatrix& a, double tol) {
  return cholesky_lower(a, tol).has_value();
}

double min_eigenvalue(const SymMatrix& a) { return jacobi_eigen(a).values(0); }

double max_eigenvalue(const SymMatrix& a) {
  const auto e = jacobi_eigen(a);
  return e.values(e.values.size() - 1);
}

double spectral_norm(const Eigen::MatrixXd& b) {
  if (b.size() == 0) return 0.0;
  const Eigen::MatrixXd gram =
      b.rows() <= b.cols() ? Eigen::MatrixXd(b * b.transpose())
                           : Eigen::MatrixXd(b.transpose() * b);
  return std::sqrt(std::max(0.0, max_eigenvalue(SymMatrix::symmetrized(gram))));
}

Eigen::VectorXd solve_spd(const SymMatrix& a, const Eigen::VectorXd& b, double tol) {
  if (b.size() != a.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "solve_spd: rhs length differs from matrix dim");
  }
  const auto l = cholesky_lower(a, tol);
  if (!l) throw Error(ErrorCode::NotPD, "solve_spd: matrix is not positive definite");
  const Eigen::Index n = a.dim();
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = b(i);
    for (Eigen::Index k = 0; k < i; ++k) s -= (*l)(i, k) * y(k);
    y(i) = s / (*l)(i, i);
  }
  Eigen::VectorXd x(n);
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    double s = y(i);
    for (Eigen::Index k = i + 1; k < n; ++k) s -= (*l)(k, i) * x(k);
    x(i) = s / (*l)(i, i);
  }
  return x;
}

}  // namespace drsafe::numerics
