#include "spd/filter.hpp"

#include <algorithm>

namespace spd {

const std::vector<double>& FilterSchedule::psi(int t) const {
  if (t < 0 || t > steps) throw OutOfRangeError("FilterSchedule::psi: t outside 0..T");
  return psi_grids[t];
}

void FilterSchedule::validate() const {
  const std::size_t bins = d_values.size();
  for (std::size_t k = 0; k < bins; ++k) {
    if (!(d_values[k] > 0.0))
      throw OutOfRangeError("FilterSchedule: model power must be positive");
    if (psi_grids[0][k] != 1.0)
      throw OutOfRangeError("FilterSchedule: psi(0) must be 1");
    if (!(psi_grids[steps][k] <= eps_min))
      throw OutOfRangeError("FilterSchedule: psi(T) must not exceed eps_min");
    for (int t = 1; t < steps; ++t) {
      const double v = psi_grids[t][k];
      if (!(v > 0.0 && v < 1.0))
        throw OutOfRangeError("FilterSchedule: interior psi outside (0, 1)");
    }
    for (int t = 1; t <= steps; ++t)
      if (!(psi_grids[t][k] < psi_grids[t - 1][k]))
        throw OutOfRangeError("FilterSchedule: psi must decrease strictly in t");
  }
}

namespace {

double dc_model_power(const SpectrumFit& fit) {
  const double base = std::pow(std::abs(fit.c2), fit.m);
  double d0 = fit.c1 / base;
  if (std::abs(fit.c2) < 1e-3) d0 = std::min(d0, 1e6);
  return d0;
}

}  // namespace

std::vector<double> model_power_grid(const SpectrumFit& fit, int height, int width) {
  const std::vector<double> grid = frequency_grid(height, width);
  std::vector<double> d(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k)
    d[k] = grid[k] == 0.0 ? dc_model_power(fit) : model_power(fit, grid[k]);
  return d;
}

FilterSchedule build_schedule(const SpectrumFit& fit, int height, int width, int steps,
                              double eps_min) {
  if (steps < 1) throw OutOfRangeError("build_schedule: T must be >= 1");
  if (!(eps_min > 0.0 && eps_min < 1.0))
    throw OutOfRangeError("build_schedule: eps_min must lie in (0, 1)");
  FilterSchedule s;
  s.eps_min = eps_min;
  s.height = height;
  s.width = width;
  s.steps = steps;
  s.fit = fit;
  s.d_values = model_power_grid(fit, height, width);

  const std::size_t bins = s.d_values.size();
  s.psi_grids.assign(steps + 1, std::vector<double>(bins));
  s.psi_grids[0].assign(bins, 1.0);
  s.psi_grids[steps].assign(bins, s.eps_min);
  for (int t = 1; t < steps; ++t) {
    const double sfrac = s.exponent(t);
    for (std::size_t k = 0; k < bins; ++k)
      s.psi_grids[t][k] = filter_weight(s.d_values[k], sfrac);
  }
  s.validate();
  return s;
}

SpdMatrix phi_pixel(const SpdMatrix& sigma0, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw OutOfRangeError("phi_pixel: t outside [0, 1]");
  EigenDecomposition d = eigh(sigma0);
  std::vector<double> vals(d.eigvals.size());
  for (std::size_t i = 0; i < vals.size(); ++i)
    vals[i] = filter_weight(d.eigvals[i], 1.0 - t);
  return SpdMatrix(d.assemble(vals));
}

double halftime_noise_mean(const SpectrumFit& fit, int height, int width) {
  const std::vector<double> d = model_power_grid(fit, height, width);
  double acc = 0.0;
  for (const double v : d) acc += 1.0 - filter_weight(v, 0.5);
  return acc / static_cast<double>(d.size());
}

SpectrumFit calibrate_c1_for_m(const SpectrumFit& reference, double target_m,
                               int height, int width) {
  const double target = halftime_noise_mean(reference, height, width);

  SpectrumFit probe = reference;
  probe.m = target_m;
  const auto mean_at = [&](double log_c1) {
    probe.c1 = std::exp(log_c1);
    return halftime_noise_mean(probe, height, width) - target;
  };

  // 1 - psi is increasing in d and d is increasing in c1, so the mean is
  // monotone in c1 and bisection applies.
  double lo = std::log(1e-6), hi = std::log(1e6);
  double flo = mean_at(lo), fhi = mean_at(hi);
  if (flo == 0.0) hi = lo;
  if (fhi == 0.0) lo = hi;
  if (flo * fhi > 0.0)
    throw NoRootError("calibrate_c1_for_m: no root in c1 bracket [1e-6, 1e6]");
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = mean_at(mid);
    if (fmid == 0.0) {
      lo = hi = mid;
      break;
    }
    if ((fmid > 0.0) == (fhi > 0.0)) {
      hi = mid;
      fhi = fmid;
    } else {
      lo = mid;
    }
  }

  SpectrumFit out = reference;
  out.m = target_m;
  out.c1 = std::exp(0.5 * (lo + hi));
  out.residual = 0.0;
  return out;
}

}  // namespace spd
