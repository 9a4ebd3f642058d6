// Acceptance suite: every criterion runs at its pinned tolerance and prints
// exactly one [PASS]/[FAIL] line (plus indented detail where useful).
// Exit code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "spd/diffusion.hpp"
#include "spd/geodesic.hpp"
#include "spd/io.hpp"

using namespace spd;
using clock_type = std::chrono::steady_clock;

namespace {

int failures = 0;

struct Timer {
  clock_type::time_point start = clock_type::now();
  double seconds() const {
    return std::chrono::duration<double>(clock_type::now() - start).count();
  }
};

void report(int index, bool pass, const std::string& text, double seconds) {
  std::printf("[%s] %d. %s  (%.1fs)\n", pass ? "PASS" : "FAIL", index, text.c_str(),
              seconds);
  if (!pass) ++failures;
}

void detail(const std::string& text) { std::printf("        %s\n", text.c_str()); }

SpectrumFit make_fit(double c1, double c2, double m) {
  SpectrumFit f;
  f.c1 = c1;
  f.c2 = c2;
  f.m = m;
  return f;
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

// ---------------------------------------------------------------- 1 & 2

void criterion_geodesic() {
  Timer timer;
  double worst_residual = 0.0, worst_boundary = 0.0;
  std::vector<GeodesicPath> paths;
  for (int k = 0; k < 20; ++k) {
    Rng rng(Rng::derive(4001, k));
    const int dim = 2 + k % 5;
    paths.emplace_back(random_spd(dim, 0.25, 4.0, rng), random_spd(dim, 0.25, 4.0, rng));
    const GeodesicPath& path = paths.back();
    worst_boundary = std::max(worst_boundary, path.boundary_error());
    const auto curve = [&path](double t) { return geodesic_point(path, t); };
    for (const double t : {0.25, 0.5, 0.75})
      worst_residual = std::max(worst_residual, geodesic_ode_residual(curve, t, 1e-3));
  }
  const bool pass1 = worst_residual <= 1e-5 && worst_boundary <= 1e-8;
  report(1, pass1,
         fmt("geodesic closed form: max equation residual %.2e <= 1e-5, "
             "max boundary error %.2e <= 1e-8",
             worst_residual, worst_boundary),
         timer.seconds());

  Timer timer2;
  const GeodesicPath scalar(SpdMatrix::diagonal({4.0}), SpdMatrix::identity(1));
  const double scalar_len = path_length(
      [&scalar](double t) { return geodesic_point(scalar, t); }, 0.0, 1.0, 1000);
  const double want = std::log(4.0) / std::sqrt(2.0);
  bool shorter = true;
  for (const GeodesicPath& path : paths) {
    const double geo =
        path_length([&path](double t) { return geodesic_point(path, t); }, 0.0, 1.0, 400);
    const double line = path_length(
        [&path](double t) {
          return SpdMatrix(symmetrize((1.0 - t) * path.sigma0.m + t * path.sigma1.m));
        },
        0.0, 1.0, 400);
    shorter = shorter && geo <= line + 1e-9;
  }
  const bool pass2 = std::abs(scalar_len - want) <= 1e-4 && shorter;
  report(2, pass2,
         fmt("path-length oracle: scalar 4->1 length %.6f vs ln(4)/sqrt(2) = %.6f "
             "(tol 1e-4); geodesic <= straight line on 20 pairs",
             scalar_len, want),
         timer2.seconds());
}

// -------------------------------------------------------------------- 3

void criterion_forward_covariance() {
  Timer timer;
  const FilterSchedule sched = build_schedule(make_fit(2.0, 0.5, 2.0), 8, 8, 100);
  bool pass = true;
  double worst = 0.0;
  for (const int t : {0, 25, 50, 75, 100}) {
    const McReport r = check_forward_covariance(sched, t, 100000, Rng::derive(90, t));
    pass = pass && r.pass;
    worst = std::max(worst, r.max_dev_se);
  }
  report(3, pass,
         fmt("forward covariance matches d^(1-t/T) at t in {0,T/4,T/2,3T/4,T}: "
             "max deviation %.2f SE <= 3 SE (n=1e5, 8x8)",
             worst),
         timer.seconds());
}

// -------------------------------------------------------------------- 4

void criterion_spectrum_fit(const char* cifar_dir) {
  Timer timer;
  const int h = 32, w = 32, channels = 3;
  const std::vector<double> grid = frequency_grid(h, w);
  PowerSpectrum ps;
  ps.channels = channels;
  ps.height = h;
  ps.width = w;
  ps.count = 1;
  ps.power.resize(static_cast<std::size_t>(channels) * grid.size());
  for (int c = 0; c < channels; ++c)
    for (std::size_t k = 0; k < grid.size(); ++k)
      ps.power[c * grid.size() + k] =
          grid[k] == 0.0 ? 1.0 : 7.7 / std::pow(std::abs(-0.3 + grid[k]), 2.0);

  const SpectrumFit fixed = fit_spectrum(ps, 2.0);
  const SpectrumFit free = fit_spectrum(ps, std::nullopt);
  const double err = std::max(
      {std::abs(fixed.c1 / 7.7 - 1.0), std::abs(fixed.c2 / -0.3 - 1.0),
       std::abs(free.c1 / 7.7 - 1.0), std::abs(free.c2 / -0.3 - 1.0),
       std::abs(free.m / 2.0 - 1.0)});
  const bool pass = err <= 1e-6;
  report(4, pass,
         fmt("spectrum fit self-consistency: planted (7.7, -0.3, 2) recovered, "
             "worst relative error %.2e <= 1e-6",
             err),
         timer.seconds());

  if (cifar_dir == nullptr) {
    detail("optional dataset reproduction skipped (set SPD_CIFAR_DIR to a "
           "directory of training images to enable)");
    return;
  }
  Timer cifar_timer;
  const auto images = load_images(std::filesystem::path(cifar_dir));
  const PowerSpectrum data = compute_power_spectrum(images);
  const SpectrumFit f2 = fit_spectrum(data, 2.0);
  const SpectrumFit fm = fit_spectrum(data, std::nullopt);
  const bool ok = std::abs(f2.c1 / 7.7 - 1.0) <= 0.15 &&
                  std::abs(f2.c2 - -0.3) <= 0.15 && std::abs(fm.m - 2.1) <= 0.15;
  detail(fmt("dataset reproduction: c1=%.3f (want 7.7 +-15%%), c2=%.3f "
             "(want -0.3 +-0.15),",
             f2.c1, f2.c2));
  detail(fmt("free m=%.3f (want 2.1 +-0.15)  [%.0fs]", fm.m, cifar_timer.seconds()) +
         (ok ? " -> pass" : " -> FAIL"));
  if (!ok) ++failures;
}

// -------------------------------------------------------------------- 5

void criterion_frequency_ordering() {
  Timer timer;
  const FilterSchedule sharpen = build_schedule(make_fit(7.7, -0.3, 2.0), 32, 32, 50);
  const FilterSchedule blur = build_schedule(make_fit(0.5, -0.3, -2.0), 32, 32, 50);
  bool pass = true;
  for (int t = 1; t < 50; ++t) {
    pass = pass && check_frequency_ordering(sharpen, t);
    pass = pass && check_frequency_ordering_reversed(blur, t);
    pass = pass && !check_frequency_ordering_reversed(sharpen, t);
    pass = pass && !check_frequency_ordering(blur, t);
  }
  report(5, pass,
         "frequency ordering: m=2 dissipates low frequencies first for all t; "
         "m=-2 is reversed",
         timer.seconds());
}

// -------------------------------------------------------------------- 6

void criterion_generation() {
  Timer timer;
  const FilterSchedule sched = build_schedule(make_fit(2.0, 0.5, 2.0), 8, 8, 100);
  const GaussianOracleDenoiser oracle(sched);
  const int n = 10000;

  bool pass = true;
  std::vector<std::string> details;
  for (const SigmaVariant variant : {SigmaVariant::kBeta, SigmaVariant::kBetaTilde}) {
    const bool tilde = variant == SigmaVariant::kBetaTilde;
    const auto samples = sample(sched, oracle, variant, 2024, n, 1);
    std::vector<double> s1(64, 0.0), s2(64, 0.0);
    for (const ImageTensor& x : samples) {
      const FreqTensor u = dft2(x);
      for (int k = 0; k < 64; ++k) {
        const double p = std::norm(u.data[k]);
        s1[k] += p;
        s2[k] += p * p;
      }
    }
    double dev_target = 0.0, dev_pred_se = 0.0, pred_bias = 0.0;
    for (int k = 0; k < 64; ++k) {
      const double mean = s1[k] / n;
      const double se =
          std::sqrt(std::max(0.0, (s2[k] - n * mean * mean) / (n - 1)) / n);
      const double d = sched.d_values[k];
      const double predicted = oracles::reverse_chain_variance(d, 100, tilde);
      dev_target = std::max(dev_target, std::abs(mean / d - 1.0));
      dev_pred_se = std::max(dev_pred_se, std::abs(mean - predicted) / se);
      pred_bias = std::max(pred_bias, std::abs(predicted / d - 1.0));
    }
    const bool variant_pass = dev_target <= 0.05;
    pass = pass && variant_pass;
    details.push_back(std::string(tilde ? "beta-tilde" : "beta      ") +
                      fmt(": max |var/d - 1| = %.1f%% (limit 5%%)", dev_target * 100.0) +
                      (variant_pass ? " -> pass" : " -> FAIL") +
                      fmt("; matches exact-chain prediction within %.1f SE "
                          "(chain bias %.1f%%)",
                          dev_pred_se, pred_bias * 100.0));
  }
  report(6, pass,
         "end-to-end generation on Gaussian data: per-bin variance within 5% of the "
         "spectrum under both sigma variants (T=100, 8x8, n=1e4)",
         timer.seconds());
  for (const std::string& line : details) detail(line);
  if (!pass)
    detail("note: the beta-tilde chain's own stationary solution deviates from d "
           "by ~2 ln(T)/T at T=100 for any spectrum (the classic lower-bound "
           "variance under-dispersion), so this half of the criterion is not "
           "attainable at these settings; the sampler itself is validated by the "
           "exact-chain cross-check above.");
}

// -------------------------------------------------------------------- 7

void criterion_training() {
  Timer timer;
  const FilterSchedule sched = build_schedule(make_fit(1.2, 0.5, 1.0), 8, 8, 4);
  const GaussianOracleDenoiser oracle(sched);
  const int T = sched.steps;
  const std::size_t bins = 64;
  const double lr = 1e-2;

  // (a) the oracle coefficients are a fixed point: the expected update over
  // the Gaussian data ensemble, computed in closed form per sampled t,
  // stays at rounding level across 1e4 loop iterations.
  double worst_update = 0.0;
  Rng t_rng(606);
  for (int step = 0; step < 10000; ++step) {
    const int t = 1 + static_cast<int>(t_rng.below(T));
    const std::vector<double> w = oracle.weights(t);
    const std::vector<double>& psi = sched.psi(t);
    double norm2 = 0.0;
    for (std::size_t k = 0; k < bins; ++k) {
      const double var_u = psi[k] * sched.d_values[k] + (1.0 - psi[k]);
      const double expected_grad =
          (2.0 / static_cast<double>(bins)) * (w[k] * var_u - std::sqrt(1.0 - psi[k]));
      norm2 += lr * expected_grad * lr * expected_grad;
    }
    worst_update = std::max(worst_update, std::sqrt(norm2));
  }
  const bool pass_fixed = worst_update <= 1e-8;

  // (b) zero-initialized stochastic training recovers the oracle weights.
  TrainState state;
  state.model = LinearFrequencyDenoiser(1, 8, 8, T);
  state.learning_rate = lr;
  Rng rng(1717);
  const int total_steps = 800000;
  std::vector<std::vector<double>> averaged(T, std::vector<double>(bins, 0.0));
  int averaged_count = 0;
  for (int step = 0; step < total_steps; ++step) {
    const ImageTensor x0 = gaussian_field(sched.d_values, 1, 8, 8, rng);
    state = train_step(std::move(state), x0, sched, rng);
    if (step >= total_steps / 2) {
      ++averaged_count;
      for (int t = 1; t <= T; ++t) {
        const std::vector<double>& w = state.model.weights(t);
        for (std::size_t k = 0; k < bins; ++k) averaged[t - 1][k] += w[k];
      }
    }
  }
  double worst_rel = 0.0;
  for (int t = 1; t <= T; ++t) {
    const std::vector<double> w_star = oracle.weights(t);
    for (std::size_t k = 0; k < bins; ++k) {
      const double w_bar = averaged[t - 1][k] / averaged_count;
      worst_rel = std::max(worst_rel, std::abs(w_bar / w_star[k] - 1.0));
    }
  }
  const bool pass_train = worst_rel <= 0.02;

  report(7, pass_fixed && pass_train,
         fmt("training: oracle coefficients are a fixed point (max expected update "
             "%.1e <= 1e-8 over 1e4 steps); zero-init training recovers them to "
             "%.2f%% per bin (limit 2%%)",
             worst_update, worst_rel * 100.0),
         timer.seconds());
}

// -------------------------------------------------------------------- 8

void criterion_ddpm_reduction() {
  Timer timer;
  const int T = 20;
  const FilterSchedule flat = build_schedule(make_fit(1.0, 0.0, 0.0), 8, 8, T);
  const oracles::ScalarDdpm ddpm{T};
  Rng rng(33);
  ImageTensor x0(1, 8, 8);
  for (double& v : x0.data) v = rng.normal();

  double worst = 0.0;
  for (int t = 1; t <= T; ++t) {
    Rng noise_a(Rng::derive(17, t)), noise_b(Rng::derive(17, t));
    const CorruptResult r = corrupt(x0, t, flat, noise_a);
    const ImageTensor eps = white_noise(1, 8, 8, noise_b);
    for (std::size_t k = 0; k < x0.data.size(); ++k)
      worst = std::max(worst, std::abs(r.x_t.data[k] -
                                       ddpm.corrupt(x0.data[k], eps.data[k], t)));
  }

  for (const bool tilde : {false, true}) {
    const SigmaSchedule sigma = SigmaSchedule::build(
        flat, tilde ? SigmaVariant::kBetaTilde : SigmaVariant::kBeta);
    for (int t = 1; t <= T; ++t) {
      ImageTensor x_t(1, 8, 8), eps_hat(1, 8, 8), z(1, 8, 8);
      Rng r2(Rng::derive(71, t));
      for (double& v : x_t.data) v = r2.normal();
      for (double& v : eps_hat.data) v = r2.normal();
      for (double& v : z.data) v = r2.normal();
      const FreqTensor got = reverse_step(dft2(x_t), t, eps_hat, flat, sigma, &z);
      ImageTensor want(1, 8, 8);
      for (std::size_t k = 0; k < want.data.size(); ++k)
        want.data[k] = ddpm.reverse(x_t.data[k], eps_hat.data[k], z.data[k], t, tilde);
      const FreqTensor want_u = dft2(want);
      for (std::size_t k = 0; k < want_u.data.size(); ++k)
        worst = std::max(worst, std::abs(got.data[k] - want_u.data[k]));
    }
  }
  report(8, worst <= 1e-10,
         fmt("flat-spectrum reduction to scalar ancestral formulas: max deviation "
             "%.2e <= 1e-10 across t = 1..20, both sigma variants",
             worst),
         timer.seconds());
}

}  // namespace

int main(int argc, char** argv) {
  const char* cifar_dir = std::getenv("SPD_CIFAR_DIR");
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--cifar-dir") cifar_dir = argv[i + 1];

  criterion_geodesic();
  criterion_forward_covariance();
  criterion_spectrum_fit(cifar_dir);
  criterion_frequency_ordering();
  criterion_generation();
  criterion_training();
  criterion_ddpm_reduction();

  if (failures == 0)
    std::printf("all acceptance criteria passed\n");
  else
    std::printf("%d acceptance check(s) failed\n", failures);
  return failures;
}
