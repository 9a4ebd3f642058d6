#include "spd/io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace spd {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr char kTensorMagic[4] = {'S', 'P', 'D', 'T'};

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f32(std::ostream& os, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(os, bits);
}

float get_f32(std::istream& is) {
  const std::uint32_t bits = get_u32(is);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

double rescale_byte(unsigned v) { return static_cast<double>(v) / 127.5 - 1.0; }

ImageTensor load_pgm(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path.string());
  std::string magic;
  is >> magic;
  if (magic != "P5") throw FormatError(path.string() + ": not a binary PGM (P5)");

  const auto next_int = [&is, &path]() {
    // Skip whitespace and '#' comment lines between header fields.
    int ch;
    while ((ch = is.peek()) != EOF) {
      if (std::isspace(ch)) {
        is.get();
      } else if (ch == '#') {
        std::string line;
        std::getline(is, line);
      } else {
        break;
      }
    }
    long v = -1;
    is >> v;
    if (!is || v < 0) throw FormatError(path.string() + ": bad PGM header");
    return v;
  };
  const long w = next_int();
  const long h = next_int();
  const long maxval = next_int();
  if (maxval != 255) throw FormatError(path.string() + ": only 8-bit PGM is supported");
  is.get();  // single whitespace after maxval

  std::vector<unsigned char> buf(static_cast<std::size_t>(w) * h);
  is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (is.gcount() != static_cast<std::streamsize>(buf.size()))
    throw FormatError(path.string() + ": truncated PGM payload");

  ImageTensor x(1, static_cast<int>(h), static_cast<int>(w));
  for (std::size_t k = 0; k < buf.size(); ++k) x.data[k] = rescale_byte(buf[k]);
  return x;
}

ImageTensor load_png(const fs::path& path) {
  std::FILE* fp = std::fopen(path.string().c_str(), "rb");
  if (!fp) throw FormatError("cannot open " + path.string());

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    if (png) png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    throw FormatError("libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    throw FormatError(path.string() + ": PNG decode error");
  }

  png_init_io(png, fp);
  png_read_info(png, info);
  png_set_expand(png);             // palette/low-depth to 8-bit
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);

  const int h = static_cast<int>(png_get_image_height(png, info));
  const int w = static_cast<int>(png_get_image_width(png, info));
  const int channels = static_cast<int>(png_get_channels(png, info));
  if (channels != 1 && channels != 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    throw FormatError(path.string() + ": unsupported PNG channel count");
  }

  std::vector<unsigned char> raster(static_cast<std::size_t>(h) * w * channels);
  std::vector<png_bytep> rows(h);
  for (int i = 0; i < h; ++i)
    rows[i] = raster.data() + static_cast<std::size_t>(i) * w * channels;
  png_read_image(png, rows.data());
  png_destroy_read_struct(&png, &info, nullptr);
  std::fclose(fp);

  ImageTensor x(channels, h, w);
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j)
      for (int c = 0; c < channels; ++c)
        x.at(c, i, j) = rescale_byte(raster[(static_cast<std::size_t>(i) * w + j) * channels + c]);
  return x;
}

bool has_tensor_magic(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  char m[4] = {};
  is.read(m, 4);
  return is && std::memcmp(m, kTensorMagic, 4) == 0;
}

}  // namespace

ImageTensor load_image(const fs::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".pgm") return load_pgm(path);
  if (ext == ".png") return load_png(path);
  if (ext == ".spdt" || has_tensor_magic(path)) return read_tensor(path);
  throw FormatError(path.string() + ": unsupported image format");
}

std::vector<ImageTensor> load_images(const std::vector<fs::path>& files) {
  if (files.empty()) throw FormatError("load_images: empty dataset");
  std::vector<ImageTensor> out;
  out.reserve(files.size());
  for (const fs::path& p : files) {
    out.push_back(load_image(p));
    if (!out.back().same_shape(out.front()))
      throw ShapeError("load_images: mixed image shapes (" + p.string() + ")");
  }
  return out;
}

std::vector<ImageTensor> load_images(const fs::path& dir) {
  if (!fs::is_directory(dir)) return load_images(std::vector<fs::path>{dir});
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = entry.path().extension().string();
    if (ext == ".pgm" || ext == ".png" || ext == ".spdt") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw FormatError("load_images: no supported images in " + dir.string());
  return load_images(files);
}

void write_pgm(const fs::path& path, const ImageTensor& x) {
  std::ofstream os(path, std::ios::binary);
  os << "P5\n" << x.width << " " << x.height << "\n255\n";
  for (int i = 0; i < x.height; ++i)
    for (int j = 0; j < x.width; ++j) {
      const double v = (x.at(0, i, j) + 1.0) * 127.5;
      const int byte = std::clamp(static_cast<int>(std::lround(v)), 0, 255);
      os.put(static_cast<char>(byte));
    }
}

void write_tensor(const fs::path& path, const ImageTensor& x) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot write " + path.string());
  os.write(kTensorMagic, 4);
  put_u32(os, static_cast<std::uint32_t>(x.channels));
  put_u32(os, static_cast<std::uint32_t>(x.height));
  put_u32(os, static_cast<std::uint32_t>(x.width));
  for (const double v : x.data) put_f32(os, static_cast<float>(v));
}

ImageTensor read_tensor(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path.string());
  char m[4];
  is.read(m, 4);
  if (!is || std::memcmp(m, kTensorMagic, 4) != 0)
    throw FormatError(path.string() + ": bad tensor magic");
  const int c = static_cast<int>(get_u32(is));
  const int h = static_cast<int>(get_u32(is));
  const int w = static_cast<int>(get_u32(is));
  if (c <= 0 || h <= 0 || w <= 0) throw FormatError(path.string() + ": bad tensor shape");
  ImageTensor x(c, h, w);
  for (double& v : x.data) v = get_f32(is);
  if (!is) throw FormatError(path.string() + ": truncated tensor payload");
  return x;
}

namespace {

json read_json_file(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open " + path.string());
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return j;
}

void write_json_file(const fs::path& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot write " + path.string());
  os << j.dump(2) << "\n";
}

}  // namespace

void write_spectrum_json(const fs::path& path, const PowerSpectrum& ps) {
  json j{{"channels", ps.channels},
         {"height", ps.height},
         {"width", ps.width},
         {"count", ps.count},
         {"power", ps.power}};
  write_json_file(path, j);
}

PowerSpectrum read_spectrum_json(const fs::path& path) {
  const json j = read_json_file(path);
  PowerSpectrum ps;
  try {
    ps.channels = j.at("channels").get<int>();
    ps.height = j.at("height").get<int>();
    ps.width = j.at("width").get<int>();
    ps.count = j.at("count").get<long long>();
    ps.power = j.at("power").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  if (ps.power.size() != static_cast<std::size_t>(ps.channels) * ps.height * ps.width)
    throw FormatError(path.string() + ": power array size mismatch");
  return ps;
}

void write_fit_json(const fs::path& path, const SpectrumFit& fit) {
  json j{{"c1", fit.c1},
         {"c2", fit.c2},
         {"m", fit.m},
         {"residual", fit.residual},
         {"fixed_m", fit.fixed_m}};
  write_json_file(path, j);
}

SpectrumFit read_fit_json(const fs::path& path) {
  const json j = read_json_file(path);
  SpectrumFit fit;
  try {
    fit.c1 = j.at("c1").get<double>();
    fit.c2 = j.at("c2").get<double>();
    fit.m = j.at("m").get<double>();
    fit.residual = j.at("residual").get<double>();
    fit.fixed_m = j.at("fixed_m").get<bool>();
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return fit;
}

void write_filter_json(const fs::path& path, const FilterSchedule& s) {
  json j{{"H", s.height},      {"W", s.width}, {"T", s.steps},
         {"c1", s.fit.c1},     {"c2", s.fit.c2}, {"m", s.fit.m},
         {"eps_min", s.eps_min}};
  write_json_file(path, j);
}

FilterSchedule read_filter_json(const fs::path& path) {
  const json j = read_json_file(path);
  try {
    SpectrumFit fit;
    fit.c1 = j.at("c1").get<double>();
    fit.c2 = j.at("c2").get<double>();
    fit.m = j.at("m").get<double>();
    return build_schedule(fit, j.at("H").get<int>(), j.at("W").get<int>(),
                          j.at("T").get<int>(), j.at("eps_min").get<double>());
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_report_json(const fs::path& path, const McReport& r) {
  json j{{"quantity", r.quantity},
         {"estimate", r.estimate},
         {"standard_error", r.standard_error},
         {"target", r.target},
         {"se_limit", r.se_limit},
         {"max_dev_se", r.max_dev_se},
         {"pass", r.pass}};
  write_json_file(path, j);
}

McReport read_report_json(const fs::path& path) {
  const json j = read_json_file(path);
  McReport r;
  try {
    r.quantity = j.at("quantity").get<std::string>();
    r.estimate = j.at("estimate").get<std::vector<double>>();
    r.standard_error = j.at("standard_error").get<std::vector<double>>();
    r.target = j.at("target").get<std::vector<double>>();
    r.se_limit = j.at("se_limit").get<double>();
    r.max_dev_se = j.at("max_dev_se").get<double>();
    r.pass = j.at("pass").get<bool>();
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return r;
}

void write_denoiser_params(const fs::path& path, const LinearFrequencyDenoiser& model) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot write " + path.string());
  const json header{{"T", model.steps},
                    {"H", model.height},
                    {"W", model.width},
                    {"C", model.channels},
                    {"model", "linear-frequency"}};
  os << header.dump() << "\n";
  os.write(kTensorMagic, 4);
  put_u32(os, static_cast<std::uint32_t>(model.steps));
  put_u32(os, static_cast<std::uint32_t>(model.height));
  put_u32(os, static_cast<std::uint32_t>(model.width));
  for (int t = 1; t <= model.steps; ++t)
    for (const double v : model.weights(t)) put_f32(os, static_cast<float>(v));
}

LinearFrequencyDenoiser read_denoiser_params(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path.string());
  std::string line;
  std::getline(is, line);
  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  if (header.value("model", "") != std::string("linear-frequency"))
    throw FormatError(path.string() + ": unknown denoiser model");

  LinearFrequencyDenoiser model(header.at("C").get<int>(), header.at("H").get<int>(),
                                header.at("W").get<int>(), header.at("T").get<int>());
  char m[4];
  is.read(m, 4);
  if (!is || std::memcmp(m, kTensorMagic, 4) != 0)
    throw FormatError(path.string() + ": bad weight payload magic");
  if (static_cast<int>(get_u32(is)) != model.steps ||
      static_cast<int>(get_u32(is)) != model.height ||
      static_cast<int>(get_u32(is)) != model.width)
    throw FormatError(path.string() + ": weight payload shape disagrees with header");
  for (int t = 1; t <= model.steps; ++t)
    for (double& v : model.weights(t)) v = get_f32(is);
  if (!is) throw FormatError(path.string() + ": truncated weight payload");
  return model;
}

namespace {

void write_csv_value(std::ostream& os, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

}  // namespace

void write_spectrum_csv(const fs::path& path, const PowerSpectrum& ps) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot write " + path.string());
  os << "channel,fx,fy,f,power\n";
  for (int c = 0; c < ps.channels; ++c)
    for (int i = 0; i < ps.height; ++i)
      for (int j = 0; j < ps.width; ++j) {
        const int fx = signed_freq(i, ps.height);
        const int fy = signed_freq(j, ps.width);
        os << c << "," << fx << "," << fy << ",";
        write_csv_value(os, std::sqrt(static_cast<double>(fx) * fx +
                                      static_cast<double>(fy) * fy));
        os << ",";
        write_csv_value(os, ps.at(c, i, j));
        os << "\n";
      }
}

void write_psi_csv(const fs::path& path, const FilterSchedule& s) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot write " + path.string());
  os << "t,f,psi\n";
  const std::vector<double> grid = frequency_grid(s.height, s.width);
  // one representative bin per unique frequency norm
  std::vector<std::pair<double, std::size_t>> unique;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    bool seen = false;
    for (const auto& [f, idx] : unique) seen = seen || f == grid[k];
    if (!seen) unique.emplace_back(grid[k], k);
  }
  std::sort(unique.begin(), unique.end());
  for (int t = 0; t <= s.steps; ++t)
    for (const auto& [f, idx] : unique) {
      os << t << ",";
      write_csv_value(os, f);
      os << ",";
      write_csv_value(os, s.psi(t)[idx]);
      os << "\n";
    }
}

CsvTable read_csv(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open " + path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(is, line)) throw FormatError(path.string() + ": empty CSV");
  std::stringstream hs(line);
  std::string cell;
  while (std::getline(hs, cell, ',')) table.header.push_back(cell);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::vector<double> row;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != table.header.size())
      throw FormatError(path.string() + ": ragged CSV row");
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace spd
