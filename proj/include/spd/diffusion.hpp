#pragma once

#include "spd/corrupt.hpp"
#include "spd/denoise.hpp"

namespace spd {

enum class SigmaVariant { kBeta, kBetaTilde };

/// Per-(t, bin) reverse-step noise variances, the diagonal analogs of the
/// two classic scalar choices: kBeta is the forward step variance
/// 1 - psi_t/psi_{t-1}, kBetaTilde the posterior variance
/// (1 - psi_{t-1}) (1 - psi_t)^-1 (1 - psi_t/psi_{t-1}).
struct SigmaSchedule {
  SigmaVariant variant = SigmaVariant::kBetaTilde;
  int steps = 0;
  std::vector<std::vector<double>> values;  // index t-1 for t = 1..T

  const std::vector<double>& value(int t) const;
  static SigmaSchedule build(const FilterSchedule& schedule, SigmaVariant variant);
};

/// Mean squared error between predicted and true noise over all elements.
double simple_loss(const ImageTensor& eps_hat, const ImageTensor& eps);

/// Analytic gradient of simple_loss with respect to eps_hat: 2 (e^ - e) / N.
ImageTensor simple_loss_grad(const ImageTensor& eps_hat, const ImageTensor& eps);

/// One reverse step in frequency space:
///   u_{t-1} = a u_t - a (1 - psi_t/psi_{t-1}) (1-psi_t)^{-1/2} dft2(eps_hat)
///             + sqrt(sigma_t) dft2(z),        a = sqrt(psi_{t-1}/psi_t)
/// with every filter applied bin-wise. Pass z = nullptr for a noiseless
/// step (the convention at t = 1).
FreqTensor reverse_step(const FreqTensor& u_t, int t, const ImageTensor& eps_hat,
                        const FilterSchedule& schedule, const SigmaSchedule& sigma,
                        const ImageTensor* z);

/// Full reverse process: x_T ~ N(0, I), then T reverse steps. Every sample
/// has its own stream derived from (seed, index), so the OpenMP version is
/// deterministic and identical to the serial one.
std::vector<ImageTensor> sample(const FilterSchedule& schedule, const Denoiser& denoiser,
                                SigmaVariant variant, std::uint64_t seed, int n,
                                int channels);
std::vector<ImageTensor> sample_serial(const FilterSchedule& schedule,
                                       const Denoiser& denoiser, SigmaVariant variant,
                                       std::uint64_t seed, int n, int channels);

/// Training state for the built-in linear denoiser; plain gradient descent.
struct TrainState {
  LinearFrequencyDenoiser model;
  long long step = 0;
  double learning_rate = 1e-2;
  double running_loss = 0.0;  // cumulative mean over all steps so far
  double last_loss = 0.0;
};

/// One training-loop body: sample t uniformly in 1..T, corrupt x0, take one
/// gradient-descent step on simple_loss(model(x_t), eps). Deterministic
/// given the stream. Throws NonFiniteLossError when the loss departs.
TrainState train_step(TrainState state, const ImageTensor& x0,
                      const FilterSchedule& schedule, Rng& rng);

}  // namespace spd
