#pragma once

#include <vector>

#include "spd/errors.hpp"

namespace spd {

/// Dense row-major square matrix of doubles. Only what the geodesic and
/// filter code needs; image-scale data never goes through this type.
struct Matrix {
  int n = 0;
  std::vector<double> a;

  Matrix() = default;
  explicit Matrix(int dim) : n(dim), a(static_cast<std::size_t>(dim) * dim, 0.0) {}

  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }

  static Matrix identity(int dim);
};

Matrix operator*(const Matrix& x, const Matrix& y);
Matrix operator+(const Matrix& x, const Matrix& y);
Matrix operator-(const Matrix& x, const Matrix& y);
Matrix operator*(double s, const Matrix& x);
Matrix transpose(const Matrix& x);
double max_abs(const Matrix& x);
double frobenius_norm(const Matrix& x);
/// (x + x^T) / 2
Matrix symmetrize(const Matrix& x);

/// Symmetric positive-definite matrix. Symmetry and positivity are checked
/// by the operations that need them (eigh), not at construction, so that the
/// documented error paths stay reachable.
struct SpdMatrix {
  Matrix m;

  SpdMatrix() = default;
  explicit SpdMatrix(Matrix mat);
  explicit SpdMatrix(int dim) : m(dim) {}

  int dim() const { return m.n; }
  double& operator()(int i, int j) { return m(i, j); }
  double operator()(int i, int j) const { return m(i, j); }

  static SpdMatrix identity(int dim);
  static SpdMatrix diagonal(const std::vector<double>& d);

  /// max |A_ij - A_ji| <= tol * max|A|
  bool is_symmetric(double tol = 1e-12) const;
};

/// Orthogonal eigendecomposition of a symmetric matrix. Columns of eigvecs
/// are the eigenvectors; eigvals are sorted descending and all positive.
struct EigenDecomposition {
  Matrix eigvecs;
  std::vector<double> eigvals;

  /// eigvecs * diag(f(eigvals)) * eigvecs^T, symmetrized.
  Matrix assemble(const std::vector<double>& vals) const;
};

/// Cyclic Jacobi eigendecomposition. Deterministic (no pivot search), ample
/// accuracy for the verification-scale matrices this library handles.
/// Throws NotSymmetricError / NotPositiveDefiniteError.
EigenDecomposition eigh(const SpdMatrix& a);

/// a^p through the eigendecomposition; SPD for every real p.
SpdMatrix matrix_power(const SpdMatrix& a, double p);

/// Cholesky factor L with a = L L^T. Throws NotPositiveDefiniteError.
Matrix cholesky(const SpdMatrix& a);

/// Solves a x = b for each column of b via the Cholesky factorization.
Matrix spd_solve(const SpdMatrix& a, const Matrix& b);

double relative_error(const Matrix& got, const Matrix& want);

}  // namespace spd
