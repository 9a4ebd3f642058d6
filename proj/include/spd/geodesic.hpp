#pragma once

#include <functional>

#include "spd/linalg.hpp"

namespace spd {

using CovarianceCurve = std::function<SpdMatrix(double)>;

/// Fisher-metric geodesic between the zero-mean Gaussians N(0, sigma0) and
/// N(0, sigma1). Precomputes the congruence F and diagonal D with
/// sigma0 = F D F^T and sigma1 = F F^T, so that points along the path are
/// F D^(1-t) F^T.
struct GeodesicPath {
  SpdMatrix sigma0;
  SpdMatrix sigma1;
  Matrix congruence;
  std::vector<double> diag_eigvals;

  GeodesicPath(SpdMatrix s0, SpdMatrix s1);

  /// Reconstruction error of the boundary conditions (max of the two
  /// relative Frobenius errors).
  double boundary_error() const;
};

/// Point on the geodesic at relative arc-length t in [0, 1].
/// Throws OutOfRangeError outside the interval.
SpdMatrix geodesic_point(const GeodesicPath& path, double t);

/// Fisher length of an SPD curve over [t0, t1]: midpoint-rule quadrature of
/// (1/sqrt(2)) Tr(S^-1 S' S^-1 S')^(1/2) with the velocity taken as the
/// centered difference across each quadrature cell, so the curve is only
/// evaluated inside [t0, t1].
double path_length(const CovarianceCurve& curve, double t0, double t1, int n_steps);

/// Frobenius norm of the second-order geodesic equation residual
/// S'' - S' S^-1 S' at time t, with centered differences of step h,
/// normalized by |S(t)|_F. Zero (up to truncation) exactly on geodesics.
double geodesic_ode_residual(const CovarianceCurve& curve, double t, double h);

}  // namespace spd
