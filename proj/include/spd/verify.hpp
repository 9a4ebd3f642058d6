#pragma once

#include <functional>
#include <iosfwd>
#include <string>

#include "spd/corrupt.hpp"

namespace spd {

/// Result of a Monte Carlo check: per-bin estimates with standard errors
/// against analytic targets. Passes when the worst deviation is within
/// se_limit standard errors (3 by default).
struct McReport {
  std::string quantity;
  std::vector<double> estimate;
  std::vector<double> standard_error;
  std::vector<double> target;
  double se_limit = 3.0;
  double max_dev_se = 0.0;
  bool pass = false;

  void finalize();
  void print(std::ostream& os) const;
};

/// Random SPD matrix with log-uniform eigenvalues in [eig_lo, eig_hi] and a
/// Haar-ish random orthogonal eigenbasis (Gram-Schmidt on a Gaussian
/// matrix). Shared by the geodesic test suites.
SpdMatrix random_spd(int dim, double eig_lo, double eig_hi, Rng& rng);

/// Frequency-space draw with per-bin variance d and enforced conjugate
/// symmetry: self-conjugate bins are real N(0, d), every other canonical
/// bin gets independent N(0, d/2) real and imaginary parts and its mirror
/// the conjugate. The inverse transform is then exactly real.
FreqTensor gaussian_field_freq(const std::vector<double>& d, int channels, int height,
                               int width, Rng& rng);

/// Pixel-space synthetic Gaussian image with spectrum d.
ImageTensor gaussian_field(const std::vector<double>& d, int channels, int height,
                           int width, Rng& rng);

/// Draws n forward pairs through the real corrupt() pipeline and compares
/// the per-bin variance of u_t with the covariance schedule d^(1-t/T).
/// Sample-parallel over fixed-size blocks with an ordered merge; results
/// are bit-identical for any thread count and equal to the serial twin.
McReport check_forward_covariance(const FilterSchedule& schedule, int t, int n,
                                  std::uint64_t seed);
McReport check_forward_covariance_serial(const FilterSchedule& schedule, int t, int n,
                                         std::uint64_t seed);

/// True iff psi_t is non-decreasing along increasing frequency norm, and
/// strictly increasing wherever the model power strictly decreases —
/// low frequencies lose signal first (the sharpening regime, m > 0).
bool check_frequency_ordering(const FilterSchedule& schedule, int t);

/// Mirror image of the check above: high frequencies lose signal first
/// (the blurring regime, m < 0).
bool check_frequency_ordering_reversed(const FilterSchedule& schedule, int t);

/// Diagonal covariance curve: maps (initial variance d, time t in [0,1])
/// to the variance at t, with v(d,0) = d and v(d,1) = 1.
using DiagonalCurve = std::function<double(double d, double t)>;

/// Fisher length of a diagonal-covariance curve over t in [0,1]:
/// (1/sqrt(2)) integral sqrt(sum_bins (d log v_bin / dt)^2), midpoint rule
/// with centered log-differences.
double diagonal_fisher_length(const std::vector<double>& d, const DiagonalCurve& curve,
                              int n_steps);

struct PathLengthEntry {
  std::string name;
  double length;
};

/// Lengths of the power-law schedule d^(1-t) (the geodesic of the diagonal
/// family) against the provided alternatives, on the model spectrum of the
/// fit. The geodesic entry is named "spd" and always comes first.
std::vector<PathLengthEntry> compare_path_lengths(
    const SpectrumFit& fit, int height, int width,
    const std::vector<std::pair<std::string, DiagonalCurve>>& alternatives, int n_steps);

/// Linear interpolation (1-t) d + t and a cosine ramp applied uniformly,
/// the two stock alternatives used by the CLI.
std::vector<std::pair<std::string, DiagonalCurve>> standard_alternative_curves();

}  // namespace spd
