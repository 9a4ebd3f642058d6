#pragma once

#include <filesystem>

#include "spd/denoise.hpp"
#include "spd/filter.hpp"
#include "spd/verify.hpp"

namespace spd {

/// 8-bit grayscale PGM (P5) or 8-bit PNG (gray or RGB). Pixel v maps to
/// v/127.5 - 1, so the result lies in [-1, 1]. Throws FormatError.
ImageTensor load_image(const std::filesystem::path& path);

/// Loads a directory (sorted by filename) or an explicit file list.
/// Throws FormatError on unsupported files or an empty dataset, ShapeError
/// when the images disagree on (C, H, W).
std::vector<ImageTensor> load_images(const std::filesystem::path& dir);
std::vector<ImageTensor> load_images(const std::vector<std::filesystem::path>& files);

/// Writes [-1, 1] data back to 8-bit PGM, one file per channel plane
/// collapsed to the first channel. Test-fixture helper.
void write_pgm(const std::filesystem::path& path, const ImageTensor& x);

/// Raw tensor file: magic "SPDT", little-endian u32 (C, H, W), then C*H*W
/// little-endian f32 values, row-major.
void write_tensor(const std::filesystem::path& path, const ImageTensor& x);
ImageTensor read_tensor(const std::filesystem::path& path);

void write_spectrum_json(const std::filesystem::path& path, const PowerSpectrum& ps);
PowerSpectrum read_spectrum_json(const std::filesystem::path& path);

void write_fit_json(const std::filesystem::path& path, const SpectrumFit& fit);
SpectrumFit read_fit_json(const std::filesystem::path& path);

/// Filter file stores only the header {H, W, T, c1, c2, m, eps_min}; the
/// psi table is recomputed on load, which is lossless by construction.
void write_filter_json(const std::filesystem::path& path, const FilterSchedule& s);
FilterSchedule read_filter_json(const std::filesystem::path& path);

void write_report_json(const std::filesystem::path& path, const McReport& r);
McReport read_report_json(const std::filesystem::path& path);

/// Denoiser parameters: one JSON header line {T, H, W, C, model}, then the
/// weight grids as a tensor payload, t-major then row-major bins.
void write_denoiser_params(const std::filesystem::path& path,
                           const LinearFrequencyDenoiser& model);
LinearFrequencyDenoiser read_denoiser_params(const std::filesystem::path& path);

/// Empirical spectrum rows (channel, fx, fy, f, power), e.g. for plotting
/// power against frequency norm.
void write_spectrum_csv(const std::filesystem::path& path, const PowerSpectrum& ps);

/// Filter rows (t, f, psi) over the unique frequency norms of the grid.
void write_psi_csv(const std::filesystem::path& path, const FilterSchedule& s);

/// Reads any CSV of numeric rows written by the two functions above;
/// returns the header names and the rows.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace spd
