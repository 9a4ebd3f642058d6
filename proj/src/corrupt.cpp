#include "spd/corrupt.hpp"

#include <cmath>

namespace spd {

ImageTensor white_noise(int channels, int height, int width, Rng& rng) {
  ImageTensor eps(channels, height, width);
  for (double& v : eps.data) v = rng.normal();
  return eps;
}

CorruptResult corrupt(const ImageTensor& x0, int t, const FilterSchedule& schedule,
                      Rng& rng) {
  if (x0.height != schedule.height || x0.width != schedule.width)
    throw ShapeError("corrupt: image does not match the filter grid");
  if (t < 0 || t > schedule.steps)
    throw OutOfRangeError("corrupt: t outside 0..T");

  CorruptResult out;
  out.eps = white_noise(x0.channels, x0.height, x0.width, rng);
  if (t == 0) {
    // psi(0) = 1 and the noise weight is 0, so the result is the input.
    out.x_t = x0;
    return out;
  }

  const std::vector<double>& psi = schedule.psi(t);
  const std::size_t plane = psi.size();
  FreqTensor u = dft2(x0);
  const FreqTensor xi = dft2(out.eps);
  for (int c = 0; c < x0.channels; ++c)
    for (std::size_t k = 0; k < plane; ++k) {
      const double w_signal = std::sqrt(psi[k]);
      const double w_noise = std::sqrt(1.0 - psi[k]);
      u.data[c * plane + k] = w_signal * u.data[c * plane + k] +
                              w_noise * xi.data[c * plane + k];
    }
  out.x_t = idft2(u);
  return out;
}

CorruptResult corrupt(const ImageTensor& x0, int t, const FilterSchedule& schedule,
                      std::uint64_t noise_seed) {
  Rng rng(noise_seed);
  return corrupt(x0, t, schedule, rng);
}

}  // namespace spd
