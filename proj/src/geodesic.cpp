#include "spd/geodesic.hpp"

#include <cmath>

namespace spd {

GeodesicPath::GeodesicPath(SpdMatrix s0, SpdMatrix s1)
    : sigma0(std::move(s0)), sigma1(std::move(s1)) {
  if (sigma0.dim() != sigma1.dim())
    throw ShapeError("GeodesicPath: endpoint dimensions differ");

  const SpdMatrix s1_half = matrix_power(sigma1, 0.5);
  const SpdMatrix s1_ihalf = matrix_power(sigma1, -0.5);
  const SpdMatrix middle(symmetrize(s1_ihalf.m * sigma0.m * s1_ihalf.m));
  EigenDecomposition d = eigh(middle);
  congruence = s1_half.m * d.eigvecs;
  diag_eigvals = std::move(d.eigvals);
}

double GeodesicPath::boundary_error() const {
  const int n = congruence.n;
  Matrix d(n);
  for (int i = 0; i < n; ++i) d(i, i) = diag_eigvals[i];
  const double e0 = relative_error(congruence * d * transpose(congruence), sigma0.m);
  const double e1 = relative_error(congruence * transpose(congruence), sigma1.m);
  return std::max(e0, e1);
}

SpdMatrix geodesic_point(const GeodesicPath& path, double t) {
  if (!(t >= 0.0 && t <= 1.0))
    throw OutOfRangeError("geodesic_point: t must lie in [0, 1]");
  const int n = path.congruence.n;
  Matrix d(n);
  for (int i = 0; i < n; ++i) d(i, i) = std::pow(path.diag_eigvals[i], 1.0 - t);
  return SpdMatrix(symmetrize(path.congruence * d * transpose(path.congruence)));
}

namespace {

double fisher_speed(const SpdMatrix& sigma, const Matrix& velocity) {
  const Matrix w = spd_solve(sigma, velocity);  // S^-1 S'
  double tr = 0.0;
  for (int i = 0; i < w.n; ++i)
    for (int k = 0; k < w.n; ++k) tr += w(i, k) * w(k, i);
  return std::sqrt(std::max(tr, 0.0)) / std::sqrt(2.0);
}

}  // namespace

double path_length(const CovarianceCurve& curve, double t0, double t1, int n_steps) {
  if (n_steps < 2) throw OutOfRangeError("path_length: n_steps must be >= 2");
  const double h = (t1 - t0) / n_steps;
  // Cell endpoints are shared between neighbors; evaluate them once.
  std::vector<SpdMatrix> ends;
  ends.reserve(n_steps + 1);
  for (int k = 0; k <= n_steps; ++k) ends.push_back(curve(t0 + k * h));

  double total = 0.0;
  for (int k = 0; k < n_steps; ++k) {
    const SpdMatrix mid = curve(t0 + (k + 0.5) * h);
    const Matrix velocity = (1.0 / h) * (ends[k + 1].m - ends[k].m);
    total += fisher_speed(mid, velocity) * h;
  }
  return total;
}

double geodesic_ode_residual(const CovarianceCurve& curve, double t, double h) {
  if (h <= 0.0) throw OutOfRangeError("geodesic_ode_residual: h must be positive");
  const SpdMatrix lo = curve(t - h);
  const SpdMatrix mid = curve(t);
  const SpdMatrix hi = curve(t + h);

  const Matrix accel = (1.0 / (h * h)) * ((hi.m - mid.m) - (mid.m - lo.m));
  const Matrix vel = (0.5 / h) * (hi.m - lo.m);
  const Matrix transport = vel * spd_solve(mid, vel);  // S' S^-1 S'
  return frobenius_norm(accel - transport) / std::max(frobenius_norm(mid.m), 1e-300);
}

}  // namespace spd
