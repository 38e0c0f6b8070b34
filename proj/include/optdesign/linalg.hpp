#pragma once

#include <Eigen/Dense>

namespace optdesign {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

namespace linalg {

/// Eigen-pairs of a symmetric matrix, eigenvalues sorted in DESCENDING order.
/// Each eigenvector is sign-normalized so its first entry with magnitude above
/// 1e-12 is positive.
struct SymEigen {
  Vector values;
  Matrix vectors;  // columns
};

SymEigen sym_eigen(const Matrix& a);

/// Ascending eigenvalues only.
Vector sym_eigenvalues(const Matrix& a);

double min_eigenvalue(const Matrix& a);

/// (a + a^T) / 2
Matrix symmetrize(const Matrix& a);

/// Largest absolute entry.
double max_abs(const Matrix& a);

/// Validates numerical PSD-ness: all eigenvalues >= -1e-9 * max(|lambda_max|, tiny).
/// Throws ValidationError with `what` in the message otherwise.
void require_psd(const Matrix& a, const char* what);

/// M^p through the symmetric eigendecomposition. Eigenvalues are clamped at
/// 1e-14 * lambda_max before powering.
Matrix sym_power(const Matrix& a, double p);

/// Numerical rank from singular values relative to the largest one.
int numerical_rank(const Matrix& a, double rel_tol = 1e-8);

/// Euclidean projection of v onto the probability simplex.
Vector project_simplex(const Vector& v);

}  // namespace linalg
}  // namespace optdesign
