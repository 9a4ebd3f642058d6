#include "spd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace spd {

Matrix Matrix::identity(int dim) {
  Matrix r(dim);
  for (int i = 0; i < dim; ++i) r(i, i) = 1.0;
  return r;
}

Matrix operator*(const Matrix& x, const Matrix& y) {
  Matrix r(x.n);
  for (int i = 0; i < x.n; ++i) {
    for (int k = 0; k < x.n; ++k) {
      const double xv = x(i, k);
      if (xv == 0.0) continue;
      for (int j = 0; j < x.n; ++j) r(i, j) += xv * y(k, j);
    }
  }
  return r;
}

Matrix operator+(const Matrix& x, const Matrix& y) {
  Matrix r(x.n);
  for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] = x.a[i] + y.a[i];
  return r;
}

Matrix operator-(const Matrix& x, const Matrix& y) {
  Matrix r(x.n);
  for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] = x.a[i] - y.a[i];
  return r;
}

Matrix operator*(double s, const Matrix& x) {
  Matrix r(x.n);
  for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] = s * x.a[i];
  return r;
}

Matrix transpose(const Matrix& x) {
  Matrix r(x.n);
  for (int i = 0; i < x.n; ++i)
    for (int j = 0; j < x.n; ++j) r(j, i) = x(i, j);
  return r;
}

double max_abs(const Matrix& x) {
  double m = 0.0;
  for (double v : x.a) m = std::max(m, std::abs(v));
  return m;
}

double frobenius_norm(const Matrix& x) {
  double s = 0.0;
  for (double v : x.a) s += v * v;
  return std::sqrt(s);
}

Matrix symmetrize(const Matrix& x) {
  Matrix r(x.n);
  for (int i = 0; i < x.n; ++i)
    for (int j = 0; j < x.n; ++j) r(i, j) = 0.5 * (x(i, j) + x(j, i));
  return r;
}

SpdMatrix::SpdMatrix(Matrix mat) : m(std::move(mat)) {
  if (m.n <= 0) throw ShapeError("SpdMatrix: dimension must be positive");
}

SpdMatrix SpdMatrix::identity(int dim) { return SpdMatrix(Matrix::identity(dim)); }

SpdMatrix SpdMatrix::diagonal(const std::vector<double>& d) {
  Matrix m(static_cast<int>(d.size()));
  for (int i = 0; i < m.n; ++i) m(i, i) = d[i];
  return SpdMatrix(std::move(m));
}

bool SpdMatrix::is_symmetric(double tol) const {
  double worst = 0.0;
  for (int i = 0; i < m.n; ++i)
    for (int j = i + 1; j < m.n; ++j) worst = std::max(worst, std::abs(m(i, j) - m(j, i)));
  return worst <= tol * std::max(max_abs(m), 1e-300);
}

Matrix EigenDecomposition::assemble(const std::vector<double>& vals) const {
  const int n = eigvecs.n;
  Matrix r(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += eigvecs(i, k) * vals[k] * eigvecs(j, k);
      r(i, j) = s;
      r(j, i) = s;
    }
  }
  return r;
}

EigenDecomposition eigh(const SpdMatrix& input) {
  if (!input.is_symmetric(1e-12)) throw NotSymmetricError("eigh: matrix is not symmetric");

  const int n = input.dim();
  Matrix a = input.m;
  Matrix v = Matrix::identity(n);

  // Cyclic Jacobi sweeps until the off-diagonal mass is negligible.
  const int max_sweeps = 100;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(2.0 * off) <= 1e-15 * std::max(frobenius_norm(a), 1e-300)) break;

    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return a(i, i) > a(j, j); });

  EigenDecomposition d;
  d.eigvecs = Matrix(n);
  d.eigvals.resize(n);
  for (int j = 0; j < n; ++j) {
    d.eigvals[j] = a(order[j], order[j]);
    for (int i = 0; i < n; ++i) d.eigvecs(i, j) = v(i, order[j]);
  }
  if (d.eigvals.back() <= 1e-300)
    throw NotPositiveDefiniteError("eigh: non-positive eigenvalue");
  return d;
}

SpdMatrix matrix_power(const SpdMatrix& a, double p) {
  EigenDecomposition d = eigh(a);
  std::vector<double> vals(d.eigvals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = std::pow(d.eigvals[i], p);
  return SpdMatrix(d.assemble(vals));
}

Matrix cholesky(const SpdMatrix& a) {
  const int n = a.dim();
  Matrix l(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = a(i, j);
      for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      if (i == j) {
        if (s <= 0.0) throw NotPositiveDefiniteError("cholesky: matrix is not positive definite");
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  return l;
}

Matrix spd_solve(const SpdMatrix& a, const Matrix& b) {
  const int n = a.dim();
  const Matrix l = cholesky(a);
  Matrix x = b;
  // L y = b
  for (int col = 0; col < n; ++col) {
    for (int i = 0; i < n; ++i) {
      double s = x(i, col);
      for (int k = 0; k < i; ++k) s -= l(i, k) * x(k, col);
      x(i, col) = s / l(i, i);
    }
    // L^T x = y
    for (int i = n - 1; i >= 0; --i) {
      double s = x(i, col);
      for (int k = i + 1; k < n; ++k) s -= l(k, i) * x(k, col);
      x(i, col) = s / l(i, i);
    }
  }
  return x;
}

double relative_error(const Matrix& got, const Matrix& want) {
  return frobenius_norm(got - want) / std::max(frobenius_norm(want), 1e-300);
}

}  // namespace spd
