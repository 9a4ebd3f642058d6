#include "spd/verify.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <numbers>
#include <ostream>

namespace spd {

void McReport::finalize() {
  max_dev_se = 0.0;
  for (std::size_t k = 0; k < estimate.size(); ++k) {
    const double se = std::max(standard_error[k], 1e-300);
    max_dev_se = std::max(max_dev_se, std::abs(estimate[k] - target[k]) / se);
  }
  pass = max_dev_se <= se_limit;
}

void McReport::print(std::ostream& os) const {
  os << quantity << "  (limit " << se_limit << " SE)\n";
  os << std::setw(6) << "bin" << std::setw(16) << "estimate" << std::setw(16)
     << "target" << std::setw(14) << "std.err" << std::setw(10) << "dev/SE" << "\n";
  for (std::size_t k = 0; k < estimate.size(); ++k) {
    const double dev = std::abs(estimate[k] - target[k]) /
                       std::max(standard_error[k], 1e-300);
    os << std::setw(6) << k << std::setw(16) << std::setprecision(8) << estimate[k]
       << std::setw(16) << target[k] << std::setw(14) << std::setprecision(4)
       << standard_error[k] << std::setw(10) << std::setprecision(3) << dev << "\n";
  }
  os << (pass ? "PASS" : "FAIL") << "  max deviation " << std::setprecision(4)
     << max_dev_se << " SE\n";
}

SpdMatrix random_spd(int dim, double eig_lo, double eig_hi, Rng& rng) {
  Matrix q(dim);
  for (double& v : q.a) v = rng.normal();
  // modified Gram-Schmidt
  for (int j = 0; j < dim; ++j) {
    for (int k = 0; k < j; ++k) {
      double dot = 0.0;
      for (int i = 0; i < dim; ++i) dot += q(i, j) * q(i, k);
      for (int i = 0; i < dim; ++i) q(i, j) -= dot * q(i, k);
    }
    double norm = 0.0;
    for (int i = 0; i < dim; ++i) norm += q(i, j) * q(i, j);
    norm = std::sqrt(norm);
    for (int i = 0; i < dim; ++i) q(i, j) /= norm;
  }
  const double lo = std::log(eig_lo), hi = std::log(eig_hi);
  std::vector<double> lam(dim);
  for (double& v : lam) v = std::exp(lo + (hi - lo) * rng.uniform());

  Matrix m(dim);
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) {
      double s = 0.0;
      for (int k = 0; k < dim; ++k) s += q(i, k) * lam[k] * q(j, k);
      m(i, j) = s;
      m(j, i) = s;
    }
  return SpdMatrix(std::move(m));
}

FreqTensor gaussian_field_freq(const std::vector<double>& d, int channels, int height,
                               int width, Rng& rng) {
  FreqTensor u(channels, height, width);
  for (int c = 0; c < channels; ++c)
    for (int i = 0; i < height; ++i)
      for (int j = 0; j < width; ++j) {
        const int mi = (height - i) % height;
        const int mj = (width - j) % width;
        const double v = d[static_cast<std::size_t>(i) * width + j];
        if (mi == i && mj == j) {
          u.at(c, i, j) = std::complex<double>(rng.normal() * std::sqrt(v), 0.0);
        } else if (std::make_pair(i, j) < std::make_pair(mi, mj)) {
          const double half = std::sqrt(0.5 * v);
          const std::complex<double> z(rng.normal() * half, rng.normal() * half);
          u.at(c, i, j) = z;
          u.at(c, mi, mj) = std::conj(z);
        }
      }
  return u;
}

ImageTensor gaussian_field(const std::vector<double>& d, int channels, int height,
                           int width, Rng& rng) {
  return idft2(gaussian_field_freq(d, channels, height, width, rng));
}

namespace {

constexpr int kSampleBlock = 1024;

struct MomentSums {
  std::vector<double> s1, s2;
  explicit MomentSums(std::size_t bins) : s1(bins, 0.0), s2(bins, 0.0) {}
  void add(const MomentSums& o) {
    for (std::size_t k = 0; k < s1.size(); ++k) {
      s1[k] += o.s1[k];
      s2[k] += o.s2[k];
    }
  }
};

// One forward draw: synthetic Gaussian data through the real corrupt()
// pipeline, then per-bin |u_t|^2.
void forward_covariance_sample(const FilterSchedule& schedule, int t,
                               std::uint64_t stream_seed, MomentSums& acc) {
  Rng rng(stream_seed);
  const ImageTensor x0 = gaussian_field(schedule.d_values, 1, schedule.height,
                                        schedule.width, rng);
  const CorruptResult fwd = corrupt(x0, t, schedule, rng);
  const FreqTensor u_t = dft2(fwd.x_t);
  for (std::size_t k = 0; k < u_t.data.size(); ++k) {
    const double p = std::norm(u_t.data[k]);
    acc.s1[k] += p;
    acc.s2[k] += p * p;
  }
}

McReport forward_covariance_report(const FilterSchedule& schedule, int t, int n,
                                   MomentSums sums) {
  const std::size_t bins = schedule.d_values.size();
  McReport r;
  r.quantity = "forward covariance, t=" + std::to_string(t);
  r.estimate.resize(bins);
  r.standard_error.resize(bins);
  r.target.resize(bins);
  const double s_exp = schedule.exponent(t);
  for (std::size_t k = 0; k < bins; ++k) {
    const double mean = sums.s1[k] / n;
    const double var = std::max(0.0, (sums.s2[k] - n * mean * mean) / (n - 1));
    r.estimate[k] = mean;
    r.standard_error[k] = std::sqrt(var / n);
    r.target[k] = std::pow(schedule.d_values[k], s_exp);
  }
  r.finalize();
  return r;
}

}  // namespace

McReport check_forward_covariance(const FilterSchedule& schedule, int t, int n,
                                  std::uint64_t seed) {
  if (t < 0 || t > schedule.steps)
    throw OutOfRangeError("check_forward_covariance: t outside 0..T");
  const std::size_t bins = schedule.d_values.size();
  const int n_blocks = (n + kSampleBlock - 1) / kSampleBlock;
  std::vector<MomentSums> partial(n_blocks, MomentSums(bins));
#pragma omp parallel for schedule(dynamic)
  for (int b = 0; b < n_blocks; ++b) {
    const int lo = b * kSampleBlock;
    const int hi = std::min(n, lo + kSampleBlock);
    for (int i = lo; i < hi; ++i)
      forward_covariance_sample(schedule, t, Rng::derive(seed, i), partial[b]);
  }
  MomentSums sums(bins);
  for (const MomentSums& p : partial) sums.add(p);
  return forward_covariance_report(schedule, t, n, std::move(sums));
}

McReport check_forward_covariance_serial(const FilterSchedule& schedule, int t, int n,
                                         std::uint64_t seed) {
  if (t < 0 || t > schedule.steps)
    throw OutOfRangeError("check_forward_covariance: t outside 0..T");
  const std::size_t bins = schedule.d_values.size();
  const int n_blocks = (n + kSampleBlock - 1) / kSampleBlock;
  MomentSums sums(bins);
  for (int b = 0; b < n_blocks; ++b) {
    MomentSums block(bins);
    const int lo = b * kSampleBlock;
    const int hi = std::min(n, lo + kSampleBlock);
    for (int i = lo; i < hi; ++i)
      forward_covariance_sample(schedule, t, Rng::derive(seed, i), block);
    sums.add(block);
  }
  return forward_covariance_report(schedule, t, n, std::move(sums));
}

namespace {

// psi depends on a bin only through its frequency norm, so the ordering
// check works on the unique ascending norms.
std::map<double, std::pair<double, double>> by_frequency(const FilterSchedule& schedule,
                                                         int t) {
  const std::vector<double> grid = frequency_grid(schedule.height, schedule.width);
  const std::vector<double>& psi = schedule.psi(t);
  std::map<double, std::pair<double, double>> rows;  // f -> (d, psi)
  for (std::size_t k = 0; k < grid.size(); ++k)
    rows[grid[k]] = {schedule.d_values[k], psi[k]};
  return rows;
}

bool ordering_holds(const FilterSchedule& schedule, int t, bool low_first) {
  if (t <= 0 || t >= schedule.steps)
    throw OutOfRangeError("check_frequency_ordering: t must be interior");
  const auto rows = by_frequency(schedule, t);
  auto it = rows.begin();
  auto prev = it++;
  for (; it != rows.end(); prev = it++) {
    const auto [d_lo, psi_lo] = prev->second;
    const auto [d_hi, psi_hi] = it->second;
    const double step = low_first ? psi_hi - psi_lo : psi_lo - psi_hi;
    const double d_step = low_first ? d_lo - d_hi : d_hi - d_lo;
    if (step < 0.0) return false;
    if (d_step > 1e-12 * std::max(d_lo, d_hi) && step <= 0.0) return false;
  }
  return true;
}

}  // namespace

bool check_frequency_ordering(const FilterSchedule& schedule, int t) {
  return ordering_holds(schedule, t, true);
}

bool check_frequency_ordering_reversed(const FilterSchedule& schedule, int t) {
  return ordering_holds(schedule, t, false);
}

double diagonal_fisher_length(const std::vector<double>& d, const DiagonalCurve& curve,
                              int n_steps) {
  if (n_steps < 2) throw OutOfRangeError("diagonal_fisher_length: n_steps must be >= 2");
  const double h = 1.0 / n_steps;
  std::vector<double> log_prev(d.size()), log_next(d.size());
  for (std::size_t k = 0; k < d.size(); ++k) log_prev[k] = std::log(curve(d[k], 0.0));

  double total = 0.0;
  for (int step = 0; step < n_steps; ++step) {
    const double t_hi = step + 1 == n_steps ? 1.0 : (step + 1) * h;
    for (std::size_t k = 0; k < d.size(); ++k) log_next[k] = std::log(curve(d[k], t_hi));
    double speed2 = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k) {
      const double g = (log_next[k] - log_prev[k]) / h;
      speed2 += g * g;
    }
    total += std::sqrt(speed2) * h;
    std::swap(log_prev, log_next);
  }
  return total / std::sqrt(2.0);
}

std::vector<PathLengthEntry> compare_path_lengths(
    const SpectrumFit& fit, int height, int width,
    const std::vector<std::pair<std::string, DiagonalCurve>>& alternatives, int n_steps) {
  const std::vector<double> d = model_power_grid(fit, height, width);

  std::vector<PathLengthEntry> out;
  out.push_back({"spd", diagonal_fisher_length(
                            d, [](double dv, double t) { return std::pow(dv, 1.0 - t); },
                            n_steps)});
  for (const auto& [name, curve] : alternatives)
    out.push_back({name, diagonal_fisher_length(d, curve, n_steps)});
  return out;
}

std::vector<std::pair<std::string, DiagonalCurve>> standard_alternative_curves() {
  const auto linear = [](double d, double t) { return (1.0 - t) * d + t; };
  const auto cosine = [](double d, double t) {
    // cosine signal ramp, normalized so alpha(0) = 1
    const double s = 0.008;
    const double f = [](double x) {
      const double c = std::cos(x * std::numbers::pi / 2.0);
      return c * c;
    }((t + s) / (1.0 + s));
    const double f0 = [](double x) {
      const double c = std::cos(x * std::numbers::pi / 2.0);
      return c * c;
    }(s / (1.0 + s));
    const double alpha = f / f0;
    return alpha * d + (1.0 - alpha);
  };
  return {{"linear", linear}, {"cosine", cosine}};
}

}  // namespace spd
