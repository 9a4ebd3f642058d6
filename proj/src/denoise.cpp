#include "spd/denoise.hpp"

#include <cmath>

namespace spd {

namespace {

ImageTensor apply_bin_weights(const ImageTensor& x_t, const std::vector<double>& w) {
  FreqTensor u = dft2(x_t);
  const std::size_t plane = w.size();
  for (int c = 0; c < u.channels; ++c)
    for (std::size_t k = 0; k < plane; ++k) u.data[c * plane + k] *= w[k];
  return idft2(u);
}

}  // namespace

std::vector<double> GaussianOracleDenoiser::weights(int t) const {
  const std::vector<double>& psi = schedule_.psi(t);
  const double s = schedule_.exponent(t);
  std::vector<double> w(psi.size());
  for (std::size_t k = 0; k < w.size(); ++k)
    w[k] = std::sqrt(1.0 - psi[k]) / std::pow(schedule_.d_values[k], s);
  return w;
}

ImageTensor GaussianOracleDenoiser::predict(const ImageTensor& x_t, int t) const {
  return apply_bin_weights(x_t, weights(t));
}

LinearFrequencyDenoiser::LinearFrequencyDenoiser(int channels_, int height_, int width_,
                                                 int steps_)
    : channels(channels_), height(height_), width(width_), steps(steps_),
      w(steps_, std::vector<double>(static_cast<std::size_t>(height_) * width_, 0.0)) {}

std::vector<double>& LinearFrequencyDenoiser::weights(int t) {
  if (t < 1 || t > steps)
    throw OutOfRangeError("LinearFrequencyDenoiser::weights: t outside 1..T");
  return w[t - 1];
}

const std::vector<double>& LinearFrequencyDenoiser::weights(int t) const {
  if (t < 1 || t > steps)
    throw OutOfRangeError("LinearFrequencyDenoiser::weights: t outside 1..T");
  return w[t - 1];
}

ImageTensor LinearFrequencyDenoiser::predict(const ImageTensor& x_t, int t) const {
  if (t == 0) {
    // No noise is present at t = 0; predict none.
    return ImageTensor(x_t.channels, x_t.height, x_t.width);
  }
  return apply_bin_weights(x_t, weights(t));
}

}  // namespace spd
