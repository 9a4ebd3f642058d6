#pragma once

#include <optional>

#include "spd/tensor.hpp"

namespace spd {

/// Per-channel mean squared DFT magnitude over a dataset.
struct PowerSpectrum {
  int channels = 0;
  int height = 0;
  int width = 0;
  long long count = 0;
  std::vector<double> power;  // channel-major row-major, same layout as ImageTensor

  double at(int c, int i, int j) const {
    return power[(static_cast<std::size_t>(c) * height + i) * width + j];
  }
};

/// Fitted inverse-power model of the spectrum: d(f) = c1 / |c2 + f|^m.
struct SpectrumFit {
  double c1 = 1.0;
  double c2 = 0.0;
  double m = 2.0;
  double residual = 0.0;  // RMS log-domain fit error
  bool fixed_m = true;
};

/// Signed integer frequency index for position i on an axis of length n.
inline int signed_freq(int i, int n) { return i <= n / 2 ? i : i - n; }

/// H*W grid of frequency norms sqrt(fx^2 + fy^2) with signed indices.
std::vector<double> frequency_grid(int height, int width);

/// Mean |dft2(image)|^2 per (channel, bin). OpenMP over fixed-size image
/// blocks with an ordered merge, so the result does not depend on the
/// thread count. Throws ShapeError on inconsistent shapes.
PowerSpectrum compute_power_spectrum(const std::vector<ImageTensor>& images);

/// Plain sequential reference for the kernel above.
PowerSpectrum compute_power_spectrum_serial(const std::vector<ImageTensor>& images);

/// Model value c1/|c2+f|^m. Throws SingularBinError when |c2+f| < 1e-6.
double model_power(const SpectrumFit& fit, double f);

/// Least squares in log power over every (channel, bin) with f > 0:
/// Gauss-Newton on (log c1, c2[, m]) with backtracking line search, seeded
/// by a log-log linear regression at c2 = 0. Pass fix_m to hold the
/// exponent fixed (the natural-image default is m = 2).
SpectrumFit fit_spectrum(const PowerSpectrum& ps, std::optional<double> fix_m);

}  // namespace spd
