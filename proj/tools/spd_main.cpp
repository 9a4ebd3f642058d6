#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "spd/diffusion.hpp"
#include "spd/geodesic.hpp"
#include "spd/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Exit-code contract: 0 success, 1 verification failure, 2 input error,
// 3 numerical failure.
constexpr int kOk = 0;
constexpr int kVerifyFail = 1;
constexpr int kInputError = 2;
constexpr int kNumericalError = 3;

fs::path sibling_with_name(const fs::path& anchor, const std::string& name) {
  fs::path dir = anchor.parent_path();
  return dir.empty() ? fs::path(name) : dir / name;
}

struct FitArgs {
  std::string data;
  std::string out;
  std::string csv;
  std::string spectrum_json;
  bool free_m = false;
};

int cmd_fit_spectrum(const FitArgs& a) {
  const std::vector<spd::ImageTensor> images = spd::load_images(fs::path(a.data));
  const spd::PowerSpectrum ps = spd::compute_power_spectrum(images);
  std::optional<double> fix_m;
  if (!a.free_m) fix_m = 2.0;
  const spd::SpectrumFit fit = spd::fit_spectrum(ps, fix_m);

  spd::write_fit_json(a.out, fit);
  const fs::path csv =
      a.csv.empty() ? sibling_with_name(a.out, "SPECTRUM.csv") : fs::path(a.csv);
  spd::write_spectrum_csv(csv, ps);
  if (!a.spectrum_json.empty()) spd::write_spectrum_json(a.spectrum_json, ps);

  std::cout << "images:   " << ps.count << " (" << ps.channels << "x" << ps.height
            << "x" << ps.width << ")\n";
  std::cout << std::setprecision(10) << "c1:       " << fit.c1 << "\n"
            << "c2:       " << fit.c2 << "\n"
            << "m:        " << fit.m << (fit.fixed_m ? "  (fixed)" : "  (fitted)") << "\n"
            << "residual: " << fit.residual << "\n";
  return kOk;
}

struct FilterArgs {
  std::string fit;
  std::string out;
  std::string psi_csv;
  int height = 0, width = 0, steps = 0;
  double m = 2.0;
  bool m_given = false;
  bool calibrate = false;
};

int cmd_make_filter(const FilterArgs& a) {
  spd::SpectrumFit fit = spd::read_fit_json(a.fit);
  if (a.m_given) {
    if (a.calibrate)
      fit = spd::calibrate_c1_for_m(fit, a.m, a.height, a.width);
    else
      fit.m = a.m;
  }
  const spd::FilterSchedule schedule = spd::build_schedule(fit, a.height, a.width, a.steps);
  spd::write_filter_json(a.out, schedule);
  const fs::path csv =
      a.psi_csv.empty() ? sibling_with_name(a.out, "PSI.csv") : fs::path(a.psi_csv);
  spd::write_psi_csv(csv, schedule);
  std::cout << std::setprecision(10) << "filter: " << a.height << "x" << a.width
            << " T=" << a.steps << " c1=" << fit.c1 << " c2=" << fit.c2
            << " m=" << fit.m << "\n";
  return kOk;
}

struct CorruptArgs {
  std::string image, filter, out, out_noise;
  int t = 0;
  std::uint64_t seed = 0;
};

int cmd_corrupt(const CorruptArgs& a) {
  const spd::FilterSchedule schedule = spd::read_filter_json(a.filter);
  const spd::ImageTensor x0 = spd::load_image(a.image);
  const spd::CorruptResult r = spd::corrupt(x0, a.t, schedule, a.seed);
  spd::write_tensor(a.out, r.x_t);
  const fs::path noise_path =
      a.out_noise.empty()
          ? sibling_with_name(a.out, fs::path(a.out).stem().string() + ".noise.spdt")
          : fs::path(a.out_noise);
  spd::write_tensor(noise_path, r.eps);
  std::cout << "corrupted t=" << a.t << " -> " << a.out << "\n";
  return kOk;
}

struct TrainArgs {
  std::string filter, data, out;
  int steps = 0;
  std::uint64_t seed = 0;
  double lr = 1e-2;
};

int cmd_train(const TrainArgs& a) {
  const spd::FilterSchedule schedule = spd::read_filter_json(a.filter);
  const std::vector<spd::ImageTensor> images = spd::load_images(fs::path(a.data));
  if (images.front().height != schedule.height || images.front().width != schedule.width)
    throw spd::ShapeError("train: dataset does not match the filter grid");

  spd::TrainState state;
  state.model = spd::LinearFrequencyDenoiser(images.front().channels, schedule.height,
                                             schedule.width, schedule.steps);
  state.learning_rate = a.lr;
  spd::Rng rng(a.seed);
  for (int k = 0; k < a.steps; ++k) {
    const std::size_t idx = rng.below(images.size());
    state = spd::train_step(std::move(state), images[idx], schedule, rng);
  }
  spd::write_denoiser_params(a.out, state.model);
  std::cout << std::setprecision(10) << "steps: " << state.step
            << "  running loss: " << state.running_loss << "\n";
  return kOk;
}

struct SampleArgs {
  std::string filter, denoiser, out, sigma = "beta-tilde";
  int n = 0;
  int channels = 1;
  std::uint64_t seed = 0;
};

int cmd_sample(const SampleArgs& a) {
  const spd::FilterSchedule schedule = spd::read_filter_json(a.filter);
  const spd::SigmaVariant variant = a.sigma == "beta"
                                        ? spd::SigmaVariant::kBeta
                                        : spd::SigmaVariant::kBetaTilde;

  std::unique_ptr<spd::Denoiser> denoiser;
  int channels = a.channels;
  if (a.denoiser == "gaussian") {
    denoiser = std::make_unique<spd::GaussianOracleDenoiser>(schedule);
  } else if (a.denoiser.rfind("linear:", 0) == 0) {
    auto model = std::make_unique<spd::LinearFrequencyDenoiser>(
        spd::read_denoiser_params(a.denoiser.substr(7)));
    if (model->height != schedule.height || model->width != schedule.width ||
        model->steps != schedule.steps)
      throw spd::ShapeError("sample: denoiser parameters do not match the filter");
    channels = model->channels;
    denoiser = std::move(model);
  } else {
    throw spd::FormatError("sample: --denoiser must be 'gaussian' or 'linear:PARAMS'");
  }

  fs::create_directories(a.out);
  const std::vector<spd::ImageTensor> images =
      spd::sample(schedule, *denoiser, variant, a.seed, a.n, channels);
  for (std::size_t i = 0; i < images.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "sample_%05zu.spdt", i);
    spd::write_tensor(fs::path(a.out) / name, images[i]);
  }
  std::cout << "wrote " << images.size() << " samples to " << a.out << "\n";
  return kOk;
}

struct VerifyArgs {
  std::string suite;
  std::string filter, fit, json_out;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int n = 100000;
  int pairs = 20;
  int height = 8, width = 8, steps = 100;
  double c1 = 2.0, c2 = 0.5, m = 2.0;
  int n_steps = 2000;
  double se_limit = 3.0;
};

spd::FilterSchedule verify_schedule(const VerifyArgs& a) {
  if (!a.filter.empty()) return spd::read_filter_json(a.filter);
  spd::SpectrumFit fit;
  fit.c1 = a.c1;
  fit.c2 = a.c2;
  fit.m = a.m;
  return spd::build_schedule(fit, a.height, a.width, a.steps);
}

int verify_geodesic(const VerifyArgs& a, json& out) {
  bool all_pass = true;
  std::cout << std::setw(5) << "pair" << std::setw(5) << "dim" << std::setw(14)
            << "boundary" << std::setw(14) << "residual" << std::setw(14)
            << "resid(h/2)" << std::setw(12) << "geo len" << std::setw(12)
            << "line len" << std::setw(7) << "ok" << "\n";
  for (int k = 0; k < a.pairs; ++k) {
    const int dim = 2 + k % 5;
    spd::Rng rng(spd::Rng::derive(a.seed, k));
    const spd::SpdMatrix s0 = spd::random_spd(dim, 0.25, 4.0, rng);
    const spd::SpdMatrix s1 = spd::random_spd(dim, 0.25, 4.0, rng);
    const spd::GeodesicPath path(s0, s1);
    const auto curve = [&path](double t) { return spd::geodesic_point(path, t); };

    const double boundary = path.boundary_error();
    double residual = 0.0, residual_half = 0.0;
    for (const double t : {0.25, 0.5, 0.75}) {
      residual = std::max(residual, spd::geodesic_ode_residual(curve, t, 1e-3));
      residual_half = std::max(residual_half, spd::geodesic_ode_residual(curve, t, 5e-4));
    }
    const double geo_len = spd::path_length(curve, 0.0, 1.0, 400);
    const auto line = [&s0, &s1](double t) {
      return spd::SpdMatrix(spd::symmetrize((1.0 - t) * s0.m + t * s1.m));
    };
    const double line_len = spd::path_length(line, 0.0, 1.0, 400);

    const bool ok = boundary <= 1e-8 && residual <= 1e-5 && residual_half <= 1e-5 &&
                    geo_len <= line_len + 1e-9;
    all_pass = all_pass && ok;
    std::cout << std::setw(5) << k << std::setw(5) << dim << std::setw(14)
              << std::setprecision(3) << boundary << std::setw(14) << residual
              << std::setw(14) << residual_half << std::setw(12) << std::setprecision(6)
              << geo_len << std::setw(12) << line_len << std::setw(7)
              << (ok ? "yes" : "NO") << "\n";
    out["pairs"].push_back({{"dim", dim},
                            {"boundary", boundary},
                            {"residual", residual},
                            {"residual_half", residual_half},
                            {"geodesic_length", geo_len},
                            {"line_length", line_len},
                            {"pass", ok}});
  }
  // Scalar closed form: variance 4 -> 1 has length ln(4)/sqrt(2).
  const spd::SpdMatrix scalar0 = spd::SpdMatrix::diagonal({4.0});
  const spd::GeodesicPath scalar_path(scalar0, spd::SpdMatrix::identity(1));
  const double scalar_len = spd::path_length(
      [&scalar_path](double t) { return spd::geodesic_point(scalar_path, t); }, 0.0, 1.0,
      1000);
  const double want = std::log(4.0) / std::sqrt(2.0);
  const bool scalar_ok = std::abs(scalar_len - want) <= 1e-4;
  all_pass = all_pass && scalar_ok;
  std::cout << "scalar length 4->1: " << std::setprecision(10) << scalar_len
            << " (closed form " << want << ") " << (scalar_ok ? "ok" : "FAIL") << "\n";
  out["scalar_length"] = scalar_len;
  out["pass"] = all_pass;
  return all_pass ? kOk : kVerifyFail;
}

int verify_covariance(const VerifyArgs& a, json& out) {
  const spd::FilterSchedule schedule = verify_schedule(a);
  const int T = schedule.steps;
  bool all_pass = true;
  std::cout << std::setw(6) << "t" << std::setw(14) << "max dev/SE" << std::setw(7)
            << "ok" << "\n";
  for (const int t : {0, T / 4, T / 2, 3 * T / 4, T}) {
    spd::McReport r =
        spd::check_forward_covariance(schedule, t, a.n, spd::Rng::derive(a.seed, 1000 + t));
    if (a.se_limit != r.se_limit) {
      r.se_limit = a.se_limit;
      r.finalize();
    }
    all_pass = all_pass && r.pass;
    std::cout << std::setw(6) << t << std::setw(14) << std::setprecision(4)
              << r.max_dev_se << std::setw(7) << (r.pass ? "yes" : "NO") << "\n";
    out["reports"].push_back({{"quantity", r.quantity},
                              {"estimate", r.estimate},
                              {"standard_error", r.standard_error},
                              {"target", r.target},
                              {"max_dev_se", r.max_dev_se},
                              {"pass", r.pass}});
  }
  out["pass"] = all_pass;
  return all_pass ? kOk : kVerifyFail;
}

int verify_ordering(const VerifyArgs& a, json& out) {
  const spd::FilterSchedule schedule = verify_schedule(a);
  bool forward = true, reversed = true;
  for (int t = 1; t < schedule.steps; ++t) {
    forward = forward && spd::check_frequency_ordering(schedule, t);
    reversed = reversed && spd::check_frequency_ordering_reversed(schedule, t);
  }
  std::string regime = "none";
  if (forward && reversed)
    regime = "flat";
  else if (forward)
    regime = "low-frequencies-first";
  else if (reversed)
    regime = "reversed (high-frequencies-first)";
  std::cout << "ordering: " << regime << "\n";
  out["regime"] = regime;
  out["pass"] = forward || reversed;
  return (forward || reversed) ? kOk : kVerifyFail;
}

int verify_lengths(const VerifyArgs& a, json& out) {
  spd::SpectrumFit fit;
  if (!a.fit.empty()) {
    fit = spd::read_fit_json(a.fit);
  } else {
    fit.c1 = a.c1;
    fit.c2 = a.c2;
    fit.m = a.m;
  }
  const std::vector<spd::PathLengthEntry> table = spd::compare_path_lengths(
      fit, a.height, a.width, spd::standard_alternative_curves(), a.n_steps);
  double best_other = std::numeric_limits<double>::infinity();
  std::cout << std::setw(10) << "curve" << std::setw(16) << "fisher length" << "\n";
  for (const auto& e : table) {
    std::cout << std::setw(10) << e.name << std::setw(16) << std::setprecision(8)
              << e.length << "\n";
    if (e.name != "spd") best_other = std::min(best_other, e.length);
    out["lengths"].push_back({{"name", e.name}, {"length", e.length}});
  }
  const bool pass = table.front().length <= best_other + 1e-12;
  std::cout << (pass ? "PASS" : "FAIL") << ": power-law schedule is shortest\n";
  out["pass"] = pass;
  return pass ? kOk : kVerifyFail;
}

int cmd_verify(const VerifyArgs& a) {
  if ((a.suite == "geodesic" || a.suite == "covariance") && !a.seed_given)
    throw spd::OutOfRangeError("verify: --seed is required for the " + a.suite + " suite");
  json out{{"suite", a.suite}};
  int rc = kInputError;
  if (a.suite == "geodesic")
    rc = verify_geodesic(a, out);
  else if (a.suite == "covariance")
    rc = verify_covariance(a, out);
  else if (a.suite == "ordering")
    rc = verify_ordering(a, out);
  else if (a.suite == "lengths")
    rc = verify_lengths(a, out);
  else
    throw spd::FormatError("verify: unknown suite " + a.suite);
  if (!a.json_out.empty()) {
    std::ofstream os(a.json_out);
    os << out.dump(2) << "\n";
  }
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shortest-path diffusion toolkit: spectrum fits, optimal corruption "
               "filters, forward/reverse diffusion, and verification oracles"};
  app.require_subcommand(1);

  FitArgs fit_args;
  CLI::App* fit = app.add_subcommand("fit-spectrum", "fit the power-spectrum model");
  fit->add_option("--data", fit_args.data, "image directory or file")
      ->required()
      ->check(CLI::ExistingPath);
  fit->add_option("--out", fit_args.out, "output fit JSON")->required();
  fit->add_flag("--free-m", fit_args.free_m, "fit the exponent m instead of fixing 2");
  fit->add_option("--csv", fit_args.csv, "spectrum CSV path (default SPECTRUM.csv)");
  fit->add_option("--spectrum-json", fit_args.spectrum_json, "also dump the spectrum JSON");

  FilterArgs filter_args;
  CLI::App* mkf = app.add_subcommand("make-filter", "build the corruption filter");
  mkf->add_option("--fit", filter_args.fit, "fit JSON")->required()->check(CLI::ExistingFile);
  mkf->add_option("--height", filter_args.height, "grid height")->required();
  mkf->add_option("--width", filter_args.width, "grid width")->required();
  mkf->add_option("--T", filter_args.steps, "diffusion steps")->required();
  mkf->add_option("--out", filter_args.out, "output filter JSON")->required();
  mkf->add_option("--psi-csv", filter_args.psi_csv, "psi CSV path (default PSI.csv)");
  CLI::Option* m_opt = mkf->add_option("--m", filter_args.m, "override the exponent m");
  mkf->add_flag("--calibrate", filter_args.calibrate,
                "rescale c1 so the half-time noise variance matches the fit's");

  CorruptArgs corrupt_args;
  CLI::App* cor = app.add_subcommand("corrupt", "apply the forward corruption");
  cor->add_option("--image", corrupt_args.image, "input image (pgm/png/spdt)")
      ->required()
      ->check(CLI::ExistingFile);
  cor->add_option("--filter", corrupt_args.filter, "filter JSON")
      ->required()
      ->check(CLI::ExistingFile);
  cor->add_option("--t", corrupt_args.t, "corruption step")->required();
  cor->add_option("--seed", corrupt_args.seed, "noise seed")->required();
  cor->add_option("--out", corrupt_args.out, "corrupted tensor path")->required();
  cor->add_option("--out-noise", corrupt_args.out_noise, "noise tensor path");

  TrainArgs train_args;
  CLI::App* trn = app.add_subcommand("train", "train the linear-frequency denoiser");
  trn->add_option("--filter", train_args.filter, "filter JSON")
      ->required()
      ->check(CLI::ExistingFile);
  trn->add_option("--data", train_args.data, "image directory")
      ->required()
      ->check(CLI::ExistingPath);
  trn->add_option("--steps", train_args.steps, "training steps")->required();
  trn->add_option("--seed", train_args.seed, "rng seed")->required();
  trn->add_option("--out", train_args.out, "parameter file")->required();
  trn->add_option("--lr", train_args.lr, "learning rate (default 1e-2)");

  SampleArgs sample_args;
  CLI::App* smp = app.add_subcommand("sample", "run the reverse process");
  smp->add_option("--filter", sample_args.filter, "filter JSON")
      ->required()
      ->check(CLI::ExistingFile);
  smp->add_option("--denoiser", sample_args.denoiser, "'gaussian' or 'linear:PARAMS'")
      ->required();
  smp->add_option("--n", sample_args.n, "number of samples")->required();
  smp->add_option("--seed", sample_args.seed, "rng seed")->required();
  smp->add_option("--sigma", sample_args.sigma, "beta or beta-tilde")
      ->check(CLI::IsMember({"beta", "beta-tilde"}));
  smp->add_option("--out", sample_args.out, "output directory")->required();
  smp->add_option("--channels", sample_args.channels, "channels for the gaussian denoiser");

  VerifyArgs verify_args;
  CLI::App* ver = app.add_subcommand("verify", "verification suites");
  ver->add_option("--suite", verify_args.suite, "geodesic|covariance|ordering|lengths")
      ->required();
  CLI::Option* seed_opt = ver->add_option("--seed", verify_args.seed, "rng seed");
  ver->add_option("--filter", verify_args.filter, "filter JSON")->check(CLI::ExistingFile);
  ver->add_option("--fit", verify_args.fit, "fit JSON")->check(CLI::ExistingFile);
  ver->add_option("--json", verify_args.json_out, "write the report JSON here");
  ver->add_option("--n", verify_args.n, "Monte Carlo sample count");
  ver->add_option("--pairs", verify_args.pairs, "random matrix pairs");
  ver->add_option("--height", verify_args.height, "synthetic grid height");
  ver->add_option("--width", verify_args.width, "synthetic grid width");
  ver->add_option("--T", verify_args.steps, "synthetic filter steps");
  ver->add_option("--c1", verify_args.c1, "synthetic fit c1");
  ver->add_option("--c2", verify_args.c2, "synthetic fit c2");
  ver->add_option("--m", verify_args.m, "synthetic fit m");
  ver->add_option("--n-steps", verify_args.n_steps, "quadrature steps for lengths");
  ver->add_option("--se-limit", verify_args.se_limit,
                  "standard-error limit for Monte Carlo checks (default 3)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kInputError;
  }

  filter_args.m_given = m_opt->count() > 0;
  verify_args.seed_given = seed_opt->count() > 0;

  try {
    if (fit->parsed()) return cmd_fit_spectrum(fit_args);
    if (mkf->parsed()) return cmd_make_filter(filter_args);
    if (cor->parsed()) return cmd_corrupt(corrupt_args);
    if (trn->parsed()) return cmd_train(train_args);
    if (smp->parsed()) return cmd_sample(sample_args);
    if (ver->parsed()) return cmd_verify(verify_args);
  } catch (const spd::FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const spd::ShapeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const spd::OutOfRangeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const spd::Error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericalError;
  }
  return kInputError;
}
