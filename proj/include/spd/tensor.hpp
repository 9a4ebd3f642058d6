#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "spd/errors.hpp"

namespace spd {

/// Real pixel-space image, channel-major row-major storage.
struct ImageTensor {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<double> data;

  ImageTensor() = default;
  ImageTensor(int c, int h, int w)
      : channels(c), height(h), width(w),
        data(static_cast<std::size_t>(c) * h * w, 0.0) {}

  double& at(int c, int i, int j) {
    return data[(static_cast<std::size_t>(c) * height + i) * width + j];
  }
  double at(int c, int i, int j) const {
    return data[(static_cast<std::size_t>(c) * height + i) * width + j];
  }
  std::size_t size() const { return data.size(); }
  bool same_shape(const ImageTensor& o) const {
    return channels == o.channels && height == o.height && width == o.width;
  }
};

/// Complex frequency-space tensor, same layout as ImageTensor.
struct FreqTensor {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<std::complex<double>> data;

  FreqTensor() = default;
  FreqTensor(int c, int h, int w)
      : channels(c), height(h), width(w),
        data(static_cast<std::size_t>(c) * h * w, {0.0, 0.0}) {}

  std::complex<double>& at(int c, int i, int j) {
    return data[(static_cast<std::size_t>(c) * height + i) * width + j];
  }
  std::complex<double> at(int c, int i, int j) const {
    return data[(static_cast<std::size_t>(c) * height + i) * width + j];
  }
  std::size_t size() const { return data.size(); }
  bool same_shape(const FreqTensor& o) const {
    return channels == o.channels && height == o.height && width == o.width;
  }
};

inline void require_same_shape(const ImageTensor& a, const ImageTensor& b,
                               const char* where) {
  if (!a.same_shape(b)) throw ShapeError(std::string(where) + ": shape mismatch");
}

}  // namespace spd
