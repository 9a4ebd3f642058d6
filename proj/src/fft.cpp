#include "spd/fft.hpp"

#include <cmath>
#include <numbers>

namespace spd {

namespace {

using cd = std::complex<double>;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void fft_pow2(std::vector<cd>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
    const cd wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      cd w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const cd u = a[i + k];
        const cd v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

// Bluestein chirp-z: expresses an arbitrary-length DFT as a circular
// convolution of power-of-two length >= 2n-1.
void fft_bluestein(std::vector<cd>& a, bool inverse) {
  const std::size_t n = a.size();
  std::size_t m = 1;
  while (m < 2 * n - 1) m <<= 1;

  const double sign = inverse ? 1.0 : -1.0;
  std::vector<cd> chirp(n);
  for (std::size_t j = 0; j < n; ++j) {
    // exp(sign * i*pi*j^2/n); j^2 taken mod 2n keeps the angle small
    const unsigned long long jj = (static_cast<unsigned long long>(j) * j) % (2 * n);
    const double ang = sign * std::numbers::pi * static_cast<double>(jj) / static_cast<double>(n);
    chirp[j] = cd(std::cos(ang), std::sin(ang));
  }

  std::vector<cd> u(m, cd(0.0, 0.0)), v(m, cd(0.0, 0.0));
  for (std::size_t j = 0; j < n; ++j) u[j] = a[j] * chirp[j];
  v[0] = std::conj(chirp[0]);
  for (std::size_t j = 1; j < n; ++j) v[j] = v[m - j] = std::conj(chirp[j]);

  fft_pow2(u, false);
  fft_pow2(v, false);
  for (std::size_t j = 0; j < m; ++j) u[j] *= v[j];
  fft_pow2(u, true);
  const double scale = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < n; ++k) a[k] = u[k] * scale * chirp[k];
}

void transform_grid(std::vector<cd>& g, int h, int w, bool inverse) {
  std::vector<cd> buf;
  buf.resize(w);
  for (int i = 0; i < h; ++i) {
    std::copy(g.begin() + static_cast<std::size_t>(i) * w,
              g.begin() + static_cast<std::size_t>(i + 1) * w, buf.begin());
    fft_inplace(buf, inverse);
    std::copy(buf.begin(), buf.end(), g.begin() + static_cast<std::size_t>(i) * w);
  }
  buf.resize(h);
  for (int j = 0; j < w; ++j) {
    for (int i = 0; i < h; ++i) buf[i] = g[static_cast<std::size_t>(i) * w + j];
    fft_inplace(buf, inverse);
    for (int i = 0; i < h; ++i) g[static_cast<std::size_t>(i) * w + j] = buf[i];
  }
}

}  // namespace

void fft_inplace(std::vector<cd>& a, bool inverse) {
  if (a.size() <= 1) return;
  if (is_pow2(a.size()))
    fft_pow2(a, inverse);
  else
    fft_bluestein(a, inverse);
}

FreqTensor dft2(const ImageTensor& x) {
  FreqTensor u(x.channels, x.height, x.width);
  const double scale = 1.0 / std::sqrt(static_cast<double>(x.height) * x.width);
  const std::size_t plane = static_cast<std::size_t>(x.height) * x.width;
  std::vector<cd> g(plane);
  for (int c = 0; c < x.channels; ++c) {
    for (std::size_t k = 0; k < plane; ++k) g[k] = cd(x.data[c * plane + k], 0.0);
    transform_grid(g, x.height, x.width, false);
    for (std::size_t k = 0; k < plane; ++k) u.data[c * plane + k] = g[k] * scale;
  }
  return u;
}

FreqTensor idft2_complex(const FreqTensor& u) {
  FreqTensor x(u.channels, u.height, u.width);
  const double scale = 1.0 / std::sqrt(static_cast<double>(u.height) * u.width);
  const std::size_t plane = static_cast<std::size_t>(u.height) * u.width;
  std::vector<cd> g(plane);
  for (int c = 0; c < u.channels; ++c) {
    std::copy(u.data.begin() + c * plane, u.data.begin() + (c + 1) * plane, g.begin());
    transform_grid(g, u.height, u.width, true);
    for (std::size_t k = 0; k < plane; ++k) x.data[c * plane + k] = g[k] * scale;
  }
  return x;
}

ImageTensor idft2(const FreqTensor& u) {
  const FreqTensor full = idft2_complex(u);
  double max_re = 0.0, max_im = 0.0;
  for (const cd& v : full.data) {
    max_re = std::max(max_re, std::abs(v.real()));
    max_im = std::max(max_im, std::abs(v.imag()));
  }
  if (max_im > 1e-8 * std::max(1.0, max_re))
    throw NonHermitianError("idft2: input is not conjugate-symmetric");
  ImageTensor x(u.channels, u.height, u.width);
  for (std::size_t k = 0; k < x.data.size(); ++k) x.data[k] = full.data[k].real();
  return x;
}

double hermitian_asymmetry(const FreqTensor& u) {
  double worst = 0.0;
  for (int c = 0; c < u.channels; ++c)
    for (int i = 0; i < u.height; ++i)
      for (int j = 0; j < u.width; ++j) {
        const cd mirror = std::conj(u.at(c, (u.height - i) % u.height,
                                         (u.width - j) % u.width));
        worst = std::max(worst, std::abs(u.at(c, i, j) - mirror));
      }
  return worst;
}

FreqTensor naive_dft2(const ImageTensor& x) {
  FreqTensor u(x.channels, x.height, x.width);
  const int h = x.height, w = x.width;
  const double scale = 1.0 / std::sqrt(static_cast<double>(h) * w);
  for (int c = 0; c < x.channels; ++c)
    for (int ki = 0; ki < h; ++ki)
      for (int kj = 0; kj < w; ++kj) {
        cd s(0.0, 0.0);
        for (int i = 0; i < h; ++i)
          for (int j = 0; j < w; ++j) {
            const double ang = -2.0 * std::numbers::pi *
                               (static_cast<double>(ki) * i / h + static_cast<double>(kj) * j / w);
            s += x.at(c, i, j) * cd(std::cos(ang), std::sin(ang));
          }
        u.at(c, ki, kj) = s * scale;
      }
  return u;
}

}  // namespace spd
