// Times the OpenMP kernels against their serial reference implementations:
// spectrum accumulation, forward-covariance Monte Carlo, and reverse-process
// sampling. Also reports the fast FFT against the direct-summation DFT.

#include <chrono>
#include <cstdio>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "spd/diffusion.hpp"
#include "spd/io.hpp"

using clock_type = std::chrono::steady_clock;

namespace {

double time_ms(const std::function<void()>& fn) {
  const auto t0 = clock_type::now();
  fn();
  const auto t1 = clock_type::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

void row(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-28s %12.1f %12.1f %9.2fx\n", name, serial_ms, parallel_ms,
              serial_ms / parallel_ms);
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (built without OpenMP)\n");
#endif
  std::printf("%-28s %12s %12s %9s\n", "kernel", "serial ms", "parallel ms", "speedup");

  spd::SpectrumFit fit;
  fit.c1 = 2.0;
  fit.c2 = 0.5;
  fit.m = 2.0;

  {
    const spd::FilterSchedule sched = spd::build_schedule(fit, 32, 32, 10);
    spd::Rng rng(7);
    std::vector<spd::ImageTensor> images;
    for (int i = 0; i < 2000; ++i)
      images.push_back(spd::gaussian_field(sched.d_values, 3, 32, 32, rng));
    spd::PowerSpectrum a, b;
    const double s = time_ms([&] { a = spd::compute_power_spectrum_serial(images); });
    const double p = time_ms([&] { b = spd::compute_power_spectrum(images); });
    row("power spectrum (2000x3x32x32)", s, p);
  }

  {
    const spd::FilterSchedule sched = spd::build_schedule(fit, 8, 8, 100);
    spd::McReport a, b;
    const double s =
        time_ms([&] { a = spd::check_forward_covariance_serial(sched, 50, 40000, 11); });
    const double p =
        time_ms([&] { b = spd::check_forward_covariance(sched, 50, 40000, 11); });
    row("forward covariance (n=4e4)", s, p);
  }

  {
    const spd::FilterSchedule sched = spd::build_schedule(fit, 8, 8, 50);
    const spd::GaussianOracleDenoiser oracle(sched);
    std::vector<spd::ImageTensor> a, b;
    const double s = time_ms([&] {
      a = spd::sample_serial(sched, oracle, spd::SigmaVariant::kBetaTilde, 3, 400, 1);
    });
    const double p = time_ms([&] {
      b = spd::sample(sched, oracle, spd::SigmaVariant::kBetaTilde, 3, 400, 1);
    });
    row("sample (T=50, n=400)", s, p);
  }

  {
    spd::Rng rng(5);
    spd::ImageTensor x(1, 32, 32);
    for (double& v : x.data) v = rng.normal();
    spd::FreqTensor a, b;
    const double s = time_ms([&] {
      for (int k = 0; k < 50; ++k) a = spd::naive_dft2(x);
    });
    const double p = time_ms([&] {
      for (int k = 0; k < 50; ++k) b = spd::dft2(x);
    });
    row("dft2 vs naive (50x 32x32)", s, p);
  }

  return 0;
}
