#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>
#include <set>

#include "doctest.h"
#include "spd/fft.hpp"
#include "spd/io.hpp"
#include "spd/rng.hpp"
#include "spd/spectrum.hpp"
#include "test_util.hpp"

using namespace spd;

namespace {

std::string pgm_bytes(int h, int w, unsigned char fill) {
  std::string s = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  s.append(static_cast<std::size_t>(h) * w, static_cast<char>(fill));
  return s;
}

ImageTensor random_image(int c, int h, int w, std::uint64_t seed) {
  Rng rng(seed);
  ImageTensor x(c, h, w);
  for (double& v : x.data) v = rng.normal();
  return x;
}

PowerSpectrum planted_spectrum(double c1, double c2, double m, int channels, int h,
                               int w) {
  PowerSpectrum ps;
  ps.channels = channels;
  ps.height = h;
  ps.width = w;
  ps.count = 1;
  const std::vector<double> grid = frequency_grid(h, w);
  ps.power.resize(static_cast<std::size_t>(channels) * grid.size());
  for (int c = 0; c < channels; ++c)
    for (std::size_t k = 0; k < grid.size(); ++k)
      ps.power[c * grid.size() + k] =
          grid[k] == 0.0 ? 1.0 : c1 / std::pow(std::abs(c2 + grid[k]), m);
  return ps;
}

}  // namespace

TEST_CASE("load_images rescales 8-bit pixels to [-1, 1]") {
  testutil::ScratchDir dir("spdspec");
  testutil::write_file(dir.path() / "a.pgm", pgm_bytes(4, 4, 255));
  testutil::write_file(dir.path() / "b.pgm", pgm_bytes(4, 4, 0));
  testutil::write_file(dir.path() / "c.pgm", pgm_bytes(4, 4, 127));
  const auto images = load_images(dir.path());
  REQUIRE(images.size() == 3);
  CHECK(images[0].at(0, 0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(images[1].at(0, 0, 0) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(images[2].at(0, 0, 0) ==
        doctest::Approx(127.0 / 127.5 - 1.0).epsilon(1e-15));
}

TEST_CASE("load_images rejects mixed shapes and unsupported files") {
  testutil::ScratchDir dir("spdspec");
  testutil::write_file(dir.path() / "a.pgm", pgm_bytes(4, 4, 10));
  testutil::write_file(dir.path() / "b.pgm", pgm_bytes(4, 6, 10));
  CHECK_THROWS_AS(load_images(dir.path()), ShapeError);

  CHECK_THROWS_AS(load_image(dir.path() / "missing.txt"), FormatError);

  testutil::ScratchDir empty("spdspec");
  CHECK_THROWS_AS(load_images(empty.path()), FormatError);
}

TEST_CASE("frequency_grid values") {
  const std::vector<double> g = frequency_grid(8, 16);
  CHECK(g[0] == 0.0);
  CHECK(g[3 * 16 + 4] == doctest::Approx(5.0).epsilon(1e-15));  // 3-4-5 triangle
}

TEST_CASE("frequency_grid matches brute-force enumeration on 4x4") {
  const std::vector<double> g = frequency_grid(4, 4);
  // independent enumeration of signed index pairs
  std::multiset<double> expected;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const int fx = i <= 2 ? i : i - 4;
      const int fy = j <= 2 ? j : j - 4;
      expected.insert(std::sqrt(static_cast<double>(fx * fx + fy * fy)));
    }
  CHECK(std::multiset<double>(g.begin(), g.end()) == expected);
}

TEST_CASE("frequency_grid is symmetric under index negation") {
  const int h = 6, w = 10;
  const std::vector<double> g = frequency_grid(h, w);
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j)
      CHECK(g[i * w + j] == g[((h - i) % h) * w + (w - j) % w]);
}

TEST_CASE("power spectrum of a constant image is pure DC") {
  ImageTensor x(1, 8, 8);
  for (double& v : x.data) v = 0.7;
  const PowerSpectrum ps = compute_power_spectrum({x});
  CHECK(ps.at(0, 0, 0) == doctest::Approx(0.7 * 0.7 * 64.0).epsilon(1e-12));
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      if (i || j) CHECK(ps.at(0, i, j) < 1e-24);
}

TEST_CASE("power spectrum of an impulse is flat") {
  ImageTensor x(1, 8, 8);
  x.at(0, 2, 5) = 1.0;
  const PowerSpectrum ps = compute_power_spectrum({x});
  for (const double p : ps.power) CHECK(p == doctest::Approx(1.0 / 64.0).epsilon(1e-12));
}

TEST_CASE("power spectrum of a cosine matches the analytic transform") {
  const int h = 8, w = 16;
  ImageTensor x(1, h, w);
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j)
      x.at(0, i, j) = std::cos(2.0 * std::numbers::pi * j / w);
  const PowerSpectrum ps = compute_power_spectrum({x});
  // hand transform: u(0, +-1) = sqrt(h w) / 2, every other bin zero
  const double want = static_cast<double>(h) * w / 4.0;
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j) {
      const double expect = (i == 0 && (j == 1 || j == w - 1)) ? want : 0.0;
      CHECK(ps.at(0, i, j) == doctest::Approx(expect).epsilon(1e-10));
    }
}

TEST_CASE("power spectrum is invariant under circular translation") {
  const ImageTensor x = random_image(2, 8, 8, 99);
  ImageTensor shifted(2, 8, 8);
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) shifted.at(c, (i + 3) % 8, (j + 5) % 8) = x.at(c, i, j);
  const PowerSpectrum a = compute_power_spectrum({x});
  const PowerSpectrum b = compute_power_spectrum({shifted});
  for (std::size_t k = 0; k < a.power.size(); ++k)
    CHECK(a.power[k] == doctest::Approx(b.power[k]).epsilon(1e-12));
}

TEST_CASE("power spectrum satisfies Parseval and conjugate symmetry") {
  const ImageTensor x = random_image(1, 6, 10, 5);
  const PowerSpectrum ps = compute_power_spectrum({x});
  double pixels = 0.0;
  for (const double v : x.data) pixels += v * v;
  double bins = 0.0;
  for (const double p : ps.power) bins += p;
  CHECK(bins == doctest::Approx(pixels).epsilon(1e-10));

  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 10; ++j)
      CHECK(ps.at(0, i, j) ==
            doctest::Approx(ps.at(0, (6 - i) % 6, (10 - j) % 10)).epsilon(1e-12));
}

TEST_CASE("parallel and serial spectrum accumulation agree") {
  std::vector<ImageTensor> images;
  for (int k = 0; k < 70; ++k) images.push_back(random_image(1, 8, 8, 1000 + k));
  const PowerSpectrum a = compute_power_spectrum(images);
  const PowerSpectrum b = compute_power_spectrum_serial(images);
  REQUIRE(a.power.size() == b.power.size());
  CHECK(a.count == b.count);
  for (std::size_t k = 0; k < a.power.size(); ++k)
    CHECK(a.power[k] == doctest::Approx(b.power[k]).epsilon(1e-12));
}

TEST_CASE("compute_power_spectrum rejects an empty dataset") {
  CHECK_THROWS_AS(compute_power_spectrum({}), ShapeError);
}

TEST_CASE("fit recovers planted parameters") {
  const PowerSpectrum ps = planted_spectrum(7.7, -0.3, 2.0, 3, 16, 16);

  const SpectrumFit fixed = fit_spectrum(ps, 2.0);
  CHECK(fixed.c1 == doctest::Approx(7.7).epsilon(1e-6));
  CHECK(fixed.c2 == doctest::Approx(-0.3).epsilon(1e-6));
  CHECK(fixed.residual < 1e-8);
  CHECK(fixed.fixed_m);

  const SpectrumFit free = fit_spectrum(ps, std::nullopt);
  CHECK(free.c1 == doctest::Approx(7.7).epsilon(1e-6));
  CHECK(free.c2 == doctest::Approx(-0.3).epsilon(1e-6));
  CHECK(free.m == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(!free.fixed_m);
}

TEST_CASE("fit with fixed m is scale-equivariant") {
  PowerSpectrum ps = planted_spectrum(3.0, 0.4, 2.0, 1, 8, 8);
  // roughen the data so the optimum is not a perfect fit
  Rng rng(123);
  for (double& p : ps.power) p *= std::exp(0.05 * rng.normal());

  const SpectrumFit base = fit_spectrum(ps, 2.0);
  const double k = 37.5;
  for (double& p : ps.power) p *= k;
  const SpectrumFit scaled = fit_spectrum(ps, 2.0);

  CHECK(scaled.c1 / base.c1 == doctest::Approx(k).epsilon(1e-8));
  CHECK(scaled.c2 == doctest::Approx(base.c2).epsilon(1e-8));
  CHECK(scaled.residual == doctest::Approx(base.residual).epsilon(1e-8));
}

TEST_CASE("fit requires three distinct frequency norms") {
  const PowerSpectrum ps = planted_spectrum(1.0, 0.0, 2.0, 1, 2, 2);
  CHECK_THROWS_AS(fit_spectrum(ps, 2.0), FitError);
}

TEST_CASE("model_power evaluation and guard") {
  SpectrumFit unit;
  unit.c1 = 1.0;
  unit.c2 = 0.0;
  unit.m = 2.0;
  CHECK(model_power(unit, 2.0) == doctest::Approx(0.25).epsilon(1e-15));

  SpectrumFit cifar;
  cifar.c1 = 7.7;
  cifar.c2 = -0.3;
  cifar.m = 2.0;
  CHECK(model_power(cifar, 1.0) == doctest::Approx(7.7 / 0.49).epsilon(1e-12));
  CHECK_THROWS_AS(model_power(cifar, 0.3), SingularBinError);

  // decreasing tail beyond the singular point
  double prev = model_power(cifar, 1.0);
  for (double f = 2.0; f < 40.0; f += 1.0) {
    const double cur = model_power(cifar, f);
    CHECK(cur < prev);
    prev = cur;
  }
}
