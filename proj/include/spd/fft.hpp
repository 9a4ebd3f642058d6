#pragma once

#include "spd/tensor.hpp"

namespace spd {

/// In-place 1D DFT of arbitrary length, unscaled (plain sum). Radix-2
/// Cooley-Tukey for powers of two, Bluestein's chirp-z otherwise.
void fft_inplace(std::vector<std::complex<double>>& a, bool inverse);

/// Unitary 2D DFT per channel: both directions carry 1/sqrt(H*W), so a
/// round trip is the identity and white pixel noise stays unit-variance
/// per frequency bin.
FreqTensor dft2(const ImageTensor& x);

/// Unitary inverse 2D DFT. Throws NonHermitianError when the imaginary
/// residue of the output exceeds 1e-8 relative to the output magnitude,
/// i.e. when the input was not the DFT of a real image.
ImageTensor idft2(const FreqTensor& u);

/// Inverse transform without the realness projection; used by tests that
/// measure the imaginary residue directly.
FreqTensor idft2_complex(const FreqTensor& u);

/// max |u[c,i,j] - conj(u[c,-i,-j])| over all bins.
double hermitian_asymmetry(const FreqTensor& u);

/// O(n^2) direct-summation 2D DFT, the serial reference the fast transform
/// is tested against.
FreqTensor naive_dft2(const ImageTensor& x);

}  // namespace spd
