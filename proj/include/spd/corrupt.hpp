#pragma once

#include "spd/fft.hpp"
#include "spd/filter.hpp"
#include "spd/rng.hpp"

namespace spd {

struct CorruptResult {
  ImageTensor x_t;  // corrupted image
  ImageTensor eps;  // pixel-space unit white noise (the training target)
};

/// Forward corruption at step t: draws pixel-space white noise, moves both
/// image and noise to frequency space, applies the diagonal filters
/// sqrt(psi_t) and sqrt(1 - psi_t), and transforms back. t = 0 returns the
/// input exactly. Throws OutOfRangeError for t outside 0..T.
CorruptResult corrupt(const ImageTensor& x0, int t, const FilterSchedule& schedule,
                      Rng& rng);
CorruptResult corrupt(const ImageTensor& x0, int t, const FilterSchedule& schedule,
                      std::uint64_t noise_seed);

/// C*H*W pixel tensor of unit white Gaussian noise.
ImageTensor white_noise(int channels, int height, int width, Rng& rng);

}  // namespace spd
