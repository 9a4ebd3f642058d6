#include "spd/diffusion.hpp"

#include <cmath>

namespace spd {

const std::vector<double>& SigmaSchedule::value(int t) const {
  if (t < 1 || t > steps) throw OutOfRangeError("SigmaSchedule::value: t outside 1..T");
  return values[t - 1];
}

SigmaSchedule SigmaSchedule::build(const FilterSchedule& schedule, SigmaVariant variant) {
  SigmaSchedule s;
  s.variant = variant;
  s.steps = schedule.steps;
  s.values.assign(schedule.steps, {});
  for (int t = 1; t <= schedule.steps; ++t) {
    const std::vector<double>& pt = schedule.psi(t);
    const std::vector<double>& pt1 = schedule.psi(t - 1);
    std::vector<double> v(pt.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
      const double beta = 1.0 - pt[k] / pt1[k];
      v[k] = variant == SigmaVariant::kBeta
                 ? beta
                 : (1.0 - pt1[k]) / (1.0 - pt[k]) * beta;
    }
    s.values[t - 1] = std::move(v);
  }
  return s;
}

double simple_loss(const ImageTensor& eps_hat, const ImageTensor& eps) {
  require_same_shape(eps_hat, eps, "simple_loss");
  double acc = 0.0;
  for (std::size_t k = 0; k < eps.data.size(); ++k) {
    const double d = eps_hat.data[k] - eps.data[k];
    acc += d * d;
  }
  return acc / static_cast<double>(eps.data.size());
}

ImageTensor simple_loss_grad(const ImageTensor& eps_hat, const ImageTensor& eps) {
  require_same_shape(eps_hat, eps, "simple_loss_grad");
  ImageTensor g(eps.channels, eps.height, eps.width);
  const double scale = 2.0 / static_cast<double>(eps.data.size());
  for (std::size_t k = 0; k < eps.data.size(); ++k)
    g.data[k] = scale * (eps_hat.data[k] - eps.data[k]);
  return g;
}

FreqTensor reverse_step(const FreqTensor& u_t, int t, const ImageTensor& eps_hat,
                        const FilterSchedule& schedule, const SigmaSchedule& sigma,
                        const ImageTensor* z) {
  if (t < 1 || t > schedule.steps) throw OutOfRangeError("reverse_step: t outside 1..T");

  const std::vector<double>& pt = schedule.psi(t);
  const std::vector<double>& pt1 = schedule.psi(t - 1);
  const std::vector<double>& sig = sigma.value(t);
  const std::size_t plane = pt.size();

  const FreqTensor xi_hat = dft2(eps_hat);
  FreqTensor zeta;
  if (z != nullptr) zeta = dft2(*z);

  FreqTensor out(u_t.channels, u_t.height, u_t.width);
  for (int c = 0; c < u_t.channels; ++c)
    for (std::size_t k = 0; k < plane; ++k) {
      const double a = std::sqrt(pt1[k] / pt[k]);
      const double b = a * (1.0 - pt[k] / pt1[k]) / std::sqrt(1.0 - pt[k]);
      std::complex<double> v = a * u_t.data[c * plane + k] -
                               b * xi_hat.data[c * plane + k];
      if (z != nullptr) v += std::sqrt(sig[k]) * zeta.data[c * plane + k];
      out.data[c * plane + k] = v;
    }
  return out;
}

namespace {

ImageTensor sample_one(const FilterSchedule& schedule, const Denoiser& denoiser,
                       const SigmaSchedule& sigma, std::uint64_t stream_seed,
                       int channels) {
  Rng rng(stream_seed);
  const ImageTensor x_terminal = white_noise(channels, schedule.height, schedule.width, rng);
  FreqTensor u = dft2(x_terminal);
  for (int t = schedule.steps; t >= 1; --t) {
    const ImageTensor x_t = idft2(u);
    const ImageTensor eps_hat = denoiser.predict(x_t, t);
    if (t > 1) {
      const ImageTensor z = white_noise(channels, schedule.height, schedule.width, rng);
      u = reverse_step(u, t, eps_hat, schedule, sigma, &z);
    } else {
      u = reverse_step(u, t, eps_hat, schedule, sigma, nullptr);
    }
  }
  return idft2(u);
}

}  // namespace

std::vector<ImageTensor> sample(const FilterSchedule& schedule, const Denoiser& denoiser,
                                SigmaVariant variant, std::uint64_t seed, int n,
                                int channels) {
  const SigmaSchedule sigma = SigmaSchedule::build(schedule, variant);
  std::vector<ImageTensor> out(n);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i)
    out[i] = sample_one(schedule, denoiser, sigma, Rng::derive(seed, i), channels);
  return out;
}

std::vector<ImageTensor> sample_serial(const FilterSchedule& schedule,
                                       const Denoiser& denoiser, SigmaVariant variant,
                                       std::uint64_t seed, int n, int channels) {
  const SigmaSchedule sigma = SigmaSchedule::build(schedule, variant);
  std::vector<ImageTensor> out(n);
  for (int i = 0; i < n; ++i)
    out[i] = sample_one(schedule, denoiser, sigma, Rng::derive(seed, i), channels);
  return out;
}

TrainState train_step(TrainState state, const ImageTensor& x0,
                      const FilterSchedule& schedule, Rng& rng) {
  const int t = 1 + static_cast<int>(rng.below(schedule.steps));
  const CorruptResult fwd = corrupt(x0, t, schedule, rng);

  // The model is linear per bin, so the chain rule collapses to a
  // frequency-space expression: dL/dw_k = (2/N) sum_c Re[(w u - xi) conj(u)].
  const FreqTensor u_t = dft2(fwd.x_t);
  const FreqTensor xi = dft2(fwd.eps);
  std::vector<double>& w = state.model.weights(t);
  const std::size_t plane = w.size();
  const double scale = 2.0 / static_cast<double>(x0.size());

  double loss = 0.0;
  std::vector<double> grad(plane, 0.0);
  for (int c = 0; c < x0.channels; ++c)
    for (std::size_t k = 0; k < plane; ++k) {
      const std::complex<double> resid =
          w[k] * u_t.data[c * plane + k] - xi.data[c * plane + k];
      loss += std::norm(resid);
      grad[k] += scale * (resid * std::conj(u_t.data[c * plane + k])).real();
    }
  loss /= static_cast<double>(x0.size());
  if (!std::isfinite(loss)) throw NonFiniteLossError("train_step: loss is not finite");

  for (std::size_t k = 0; k < plane; ++k) w[k] -= state.learning_rate * grad[k];

  state.step += 1;
  state.last_loss = loss;
  state.running_loss += (loss - state.running_loss) / static_cast<double>(state.step);
  return state;
}

}  // namespace spd
