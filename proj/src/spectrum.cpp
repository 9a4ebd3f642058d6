#include "spd/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "spd/fft.hpp"

namespace spd {

std::vector<double> frequency_grid(int height, int width) {
  std::vector<double> f(static_cast<std::size_t>(height) * width);
  for (int i = 0; i < height; ++i) {
    const double fx = signed_freq(i, height);
    for (int j = 0; j < width; ++j) {
      const double fy = signed_freq(j, width);
      f[static_cast<std::size_t>(i) * width + j] = std::sqrt(fx * fx + fy * fy);
    }
  }
  return f;
}

namespace {

void accumulate_power(const ImageTensor& x, std::vector<double>& acc) {
  const FreqTensor u = dft2(x);
  for (std::size_t k = 0; k < u.data.size(); ++k) acc[k] += std::norm(u.data[k]);
}

PowerSpectrum finalize(const ImageTensor& shape, std::vector<double> sums, long long count) {
  PowerSpectrum ps;
  ps.channels = shape.channels;
  ps.height = shape.height;
  ps.width = shape.width;
  ps.count = count;
  const double inv = 1.0 / static_cast<double>(count);
  for (double& v : sums) v *= inv;
  ps.power = std::move(sums);
  return ps;
}

void check_shapes(const std::vector<ImageTensor>& images) {
  if (images.empty()) throw ShapeError("compute_power_spectrum: empty dataset");
  for (const ImageTensor& x : images)
    if (!x.same_shape(images.front()))
      throw ShapeError("compute_power_spectrum: mixed image shapes");
}

constexpr int kImageBlock = 32;

}  // namespace

PowerSpectrum compute_power_spectrum(const std::vector<ImageTensor>& images) {
  check_shapes(images);
  const std::size_t bins = images.front().size();
  const int n = static_cast<int>(images.size());
  const int n_blocks = (n + kImageBlock - 1) / kImageBlock;

  std::vector<std::vector<double>> partial(n_blocks);
#pragma omp parallel for schedule(dynamic)
  for (int b = 0; b < n_blocks; ++b) {
    std::vector<double> acc(bins, 0.0);
    const int lo = b * kImageBlock;
    const int hi = std::min(n, lo + kImageBlock);
    for (int i = lo; i < hi; ++i) accumulate_power(images[i], acc);
    partial[b] = std::move(acc);
  }

  std::vector<double> sums(bins, 0.0);
  for (int b = 0; b < n_blocks; ++b)
    for (std::size_t k = 0; k < bins; ++k) sums[k] += partial[b][k];
  return finalize(images.front(), std::move(sums), n);
}

PowerSpectrum compute_power_spectrum_serial(const std::vector<ImageTensor>& images) {
  check_shapes(images);
  std::vector<double> sums(images.front().size(), 0.0);
  for (const ImageTensor& x : images) accumulate_power(x, sums);
  return finalize(images.front(), std::move(sums), static_cast<long long>(images.size()));
}

double model_power(const SpectrumFit& fit, double f) {
  const double base = std::abs(fit.c2 + f);
  if (base < 1e-6) throw SingularBinError("model_power: |c2 + f| below 1e-6");
  return fit.c1 / std::pow(base, fit.m);
}

namespace {

struct FitSample {
  double f;
  double log_p;
};

// One Gauss-Newton run. Returns nullopt when an iterate walked into a
// singular bin; the caller excludes those frequencies and restarts once.
struct GnResult {
  double log_c1, c2, m, rms;
  bool converged;
};

double sse_at(const std::vector<FitSample>& s, double log_c1, double c2, double m,
              bool* singular) {
  double sse = 0.0;
  for (const FitSample& k : s) {
    const double base = std::abs(c2 + k.f);
    if (base < 1e-6) {
      *singular = true;
      return std::numeric_limits<double>::infinity();
    }
    const double r = k.log_p - (log_c1 - m * std::log(base));
    sse += r * r;
  }
  return sse;
}

// Solve the (up to 3x3) normal equations with partial pivoting.
bool solve_small(std::vector<std::vector<double>> a, std::vector<double> b,
                 std::vector<double>& out) {
  const int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-300) return false;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (int r = col + 1; r < n; ++r) {
      const double fac = a[r][col] / a[col][col];
      for (int c = col; c < n; ++c) a[r][c] -= fac * a[col][c];
      b[r] -= fac * b[col];
    }
  }
  out.assign(n, 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < n; ++c) s -= a[r][c] * out[c];
    out[r] = s / a[r][r];
  }
  return true;
}

std::optional<GnResult> gauss_newton(const std::vector<FitSample>& samples,
                                     std::optional<double> fix_m,
                                     std::set<double>* singular_fs) {
  // Seed from a log-log regression with c2 = 0.
  double log_c1 = 0.0, m = 2.0;
  if (fix_m) {
    m = *fix_m;
    double acc = 0.0;
    for (const FitSample& k : samples) acc += k.log_p + m * std::log(k.f);
    log_c1 = acc / static_cast<double>(samples.size());
  } else {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const FitSample& k : samples) {
      const double x = std::log(k.f);
      sx += x;
      sy += k.log_p;
      sxx += x * x;
      sxy += x * k.log_p;
    }
    const double n = static_cast<double>(samples.size());
    const double denom = n * sxx - sx * sx;
    const double slope = denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
    m = -slope;
    log_c1 = (sy - slope * sx) / n;
  }
  double c2 = 0.0;

  const int n_params = fix_m ? 2 : 3;
  bool singular = false;
  double sse = sse_at(samples, log_c1, c2, m, &singular);

  for (int iter = 0; iter < 200; ++iter) {
    // Normal equations J^T J delta = -J^T r for parameters (log_c1, c2[, m]).
    std::vector<std::vector<double>> jtj(n_params, std::vector<double>(n_params, 0.0));
    std::vector<double> jtr(n_params, 0.0);
    for (const FitSample& k : samples) {
      const double denom = c2 + k.f;
      const double base = std::abs(denom);
      if (base < 1e-6) {
        singular_fs->insert(k.f);
        return std::nullopt;
      }
      const double r = k.log_p - (log_c1 - m * std::log(base));
      double jac[3] = {-1.0, m / denom, std::log(base)};
      for (int p = 0; p < n_params; ++p) {
        jtr[p] += jac[p] * r;
        for (int q = 0; q < n_params; ++q) jtj[p][q] += jac[p] * jac[q];
      }
    }
    std::vector<double> delta;
    if (!solve_small(jtj, jtr, delta)) break;
    for (double& d : delta) d = -d;

    // Backtracking line search on the SSE.
    double scale = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      bool sing = false;
      const double lc1 = log_c1 + scale * delta[0];
      const double nc2 = c2 + scale * delta[1];
      const double nm = n_params == 3 ? m + scale * delta[2] : m;
      const double trial = sse_at(samples, lc1, nc2, nm, &sing);
      if (sing) {
        scale *= 0.5;
        continue;
      }
      if (trial < sse) {
        log_c1 = lc1;
        c2 = nc2;
        m = nm;
        sse = trial;
        accepted = true;
        break;
      }
      scale *= 0.5;
    }

    double step_norm = 0.0;
    for (const double d : delta) step_norm += d * d;
    step_norm = std::sqrt(step_norm) * (accepted ? scale : 0.0);
    if (!accepted || step_norm < 1e-10) {
      // Flag iterates that stalled against a singular bin so the caller
      // can exclude it and retry.
      for (const FitSample& k : samples)
        if (std::abs(c2 + k.f) < 1e-6) singular_fs->insert(k.f);
      if (!singular_fs->empty() && !accepted) return std::nullopt;
      return GnResult{log_c1, c2, m,
                      std::sqrt(sse / static_cast<double>(samples.size())), true};
    }
  }
  return GnResult{log_c1, c2, m, std::sqrt(sse / static_cast<double>(samples.size())),
                  false};
}

}  // namespace

SpectrumFit fit_spectrum(const PowerSpectrum& ps, std::optional<double> fix_m) {
  const std::vector<double> grid = frequency_grid(ps.height, ps.width);
  const std::size_t plane = grid.size();

  std::vector<FitSample> samples;
  std::set<double> distinct;
  for (int c = 0; c < ps.channels; ++c)
    for (std::size_t k = 0; k < plane; ++k) {
      const double f = grid[k];
      const double p = ps.power[c * plane + k];
      if (f <= 0.0 || p <= 0.0) continue;  // the DC bin is never fitted
      samples.push_back({f, std::log(p)});
      distinct.insert(f);
    }
  if (distinct.size() < 3)
    throw FitError("fit_spectrum: need at least 3 distinct positive-power frequencies");

  std::set<double> excluded;
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::vector<FitSample> active;
    for (const FitSample& s : samples)
      if (!excluded.count(s.f)) active.push_back(s);
    if (active.size() < 3) throw SingularBinError("fit_spectrum: too many singular bins");

    std::set<double> singular_fs;
    const std::optional<GnResult> res = gauss_newton(active, fix_m, &singular_fs);
    if (!res) {
      excluded.insert(singular_fs.begin(), singular_fs.end());
      continue;  // restart once with the offending bins removed
    }
    if (!res->converged) throw FitError("fit_spectrum: no convergence in 200 iterations");
    SpectrumFit fit;
    fit.c1 = std::exp(res->log_c1);
    fit.c2 = res->c2;
    fit.m = res->m;
    fit.residual = res->rms;
    fit.fixed_m = fix_m.has_value();
    return fit;
  }
  throw SingularBinError("fit_spectrum: singular bins persisted after restart");
}

}  // namespace spd
