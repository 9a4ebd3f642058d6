#pragma once

#include <cmath>

#include "spd/linalg.hpp"
#include "spd/spectrum.hpp"

namespace spd {

/// Signal-retention weight (1 - d^s) / (1 - d) for one frequency bin, where
/// s = 1 - t/T. The singularity at d = 1 is removable; the limit is s.
/// Lies in (0, 1) for every d > 0 and s in (0, 1).
inline double filter_weight(double d, double s) {
  if (std::abs(1.0 - d) < 1e-6) return s;
  return (1.0 - std::pow(d, s)) / (1.0 - d);
}

/// Diagonal frequency-space corruption filter for t = 0..T. psi(0) is
/// exactly one, psi(T) is floored at eps_min so the reverse process stays
/// invertible, and in between psi decreases strictly in t per bin.
struct FilterSchedule {
  int height = 0;
  int width = 0;
  int steps = 0;  // T
  double eps_min = 1e-8;
  SpectrumFit fit;               // model the d values came from
  std::vector<double> d_values;  // H*W model power per bin

  const std::vector<double>& psi(int t) const;
  /// Exponent 1 - t/T used by the covariance schedule d^(1-t/T).
  double exponent(int t) const {
    return static_cast<double>(steps - t) / static_cast<double>(steps);
  }

  /// Boundary, range and monotonicity invariants; throws OutOfRangeError.
  void validate() const;

  std::vector<std::vector<double>> psi_grids;  // t = 0..T
};

/// Model power per bin on the H x W frequency grid. At f = 0 the model is
/// evaluated at |c2| and capped at 1e6 when |c2| < 1e-3, since the fit
/// never sees the DC bin.
std::vector<double> model_power_grid(const SpectrumFit& fit, int height, int width);

/// model_power_grid plus the full psi table for t = 0..T.
FilterSchedule build_schedule(const SpectrumFit& fit, int height, int width, int steps,
                              double eps_min = 1e-8);

/// Pixel-space corruption transform (I - Sigma0^(1-t)) (I - Sigma0)^(-1),
/// evaluated per eigenvalue with the same removable-singularity rule as
/// filter_weight. Dense cross-validation twin of the frequency route.
SpdMatrix phi_pixel(const SpdMatrix& sigma0, double t);

/// Mean over bins of the half-time noise variance 1 - psi at s = 1/2.
double halftime_noise_mean(const SpectrumFit& fit, int height, int width);

/// Finds c1 such that the half-time mean noise variance under
/// (c1, reference.c2, target_m) equals the reference's, by bisection on
/// log c1 over [1e-6, 1e6]. Throws NoRootError if the bracket fails.
SpectrumFit calibrate_c1_for_m(const SpectrumFit& reference, double target_m,
                               int height, int width);

}  // namespace spd
