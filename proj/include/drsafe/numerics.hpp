#pragma once

#include <Eigen/Dense>

namespace drsafe::numerics {

inline constexpr double kDefaultPdTol = 1e-9;

/// Dense symmetric matrix. Only the lower triangle of the input is read;
/// the upper triangle is mirrored from it, so entries(i,j) == entries(j,i)
/// holds bit-for-bit.
class SymMatrix {
 public:
  explicit SymMatrix(const Eigen::MatrixXd& lower);

  static SymMatrix identity(Eigen::Index dim);
  static SymMatrix diagonal(const Eigen::VectorXd& d);
  // Averages A and A^T; use for products that are symmetric in exact
  // arithmetic but not after rounding.
  static SymMatrix symmetrized(const Eigen::MatrixXd& a);

  Eigen::Index dim() const { return entries_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }
  const Eigen::MatrixXd& matrix() const { return entries_; }

 private:
  SymMatrix() = default;
  Eigen::MatrixXd entries_;
};

struct EigenDecomposition {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // column j pairs with values(j)
};

// Cyclic Jacobi rotations; intended for dim up to a few dozen.
EigenDecomposition jacobi_eigen(const SymMatrix& a, int max_sweeps = 100);

// True iff the Cholesky factorization runs with every pivot > tol.
bool is_positive_definite(const SymMatrix& a, double tol = kDefaultPdTol);

double min_eigenvalue(const SymMatrix& a);
double max_eigenvalue(const SymMatrix& a);

/// Largest singular value, from the extreme eigenvalue of B^T B or B B^T
/// (whichever Gram matrix is smaller).
double spectral_norm(const Eigen::MatrixXd& b);

/// Solves A x = b by Cholesky. Throws Error(NotPD) when some pivot <= tol.
Eigen::VectorXd solve_spd(const SymMatrix& a, const Eigen::VectorXd& b,
                          double tol = kDefaultPdTol);

}  // namespace drsafe::numerics
