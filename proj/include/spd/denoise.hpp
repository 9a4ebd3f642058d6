#pragma once

#include "spd/fft.hpp"
#include "spd/filter.hpp"

namespace spd {

/// Noise-prediction interface: estimates the white noise that produced x_t.
class Denoiser {
 public:
  virtual ~Denoiser() = default;
  virtual ImageTensor predict(const ImageTensor& x_t, int t) const = 0;
};

/// Exact conditional mean of the frequency noise given u_t when the data is
/// zero-mean Gaussian with the schedule's spectrum: per bin
/// xi_hat = sqrt(1 - psi_t) * u_t / d^(1-t/T), since the pair (u_t, xi_t)
/// is jointly Gaussian with Cov = sqrt(1 - psi_t) and Var(u_t) = d^(1-t/T).
/// The caller keeps the schedule alive.
class GaussianOracleDenoiser final : public Denoiser {
 public:
  explicit GaussianOracleDenoiser(const FilterSchedule& schedule) : schedule_(schedule) {}
  ImageTensor predict(const ImageTensor& x_t, int t) const override;

  /// Per-bin regression weight at step t (shared across channels).
  std::vector<double> weights(int t) const;

 private:
  const FilterSchedule& schedule_;
};

/// Trainable per-frequency linear model xi_hat = w_t(bin) * u_t with
/// independent real weights per (t, bin), shared across channels. Has a
/// known optimum on Gaussian data (the oracle above), which makes the
/// training loop verifiable end to end.
class LinearFrequencyDenoiser final : public Denoiser {
 public:
  LinearFrequencyDenoiser() = default;
  LinearFrequencyDenoiser(int channels, int height, int width, int steps);

  ImageTensor predict(const ImageTensor& x_t, int t) const override;

  std::vector<double>& weights(int t);
  const std::vector<double>& weights(int t) const;

  int channels = 0;
  int height = 0;
  int width = 0;
  int steps = 0;
  /// One H*W weight grid per step, index t-1 for t = 1..T.
  std::vector<std::vector<double>> w;
};

}  // namespace spd
