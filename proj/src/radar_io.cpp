#include "coral/radar_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include <json.hpp>

namespace coral {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void apply_meta(PolarRadarImage& image, const std::string& meta_path) {
  std::ifstream f(meta_path);
  if (!f) throw DataError("cannot open " + meta_path);
  nlohmann::json meta;
  try {
    f >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(meta_path + ": " + e.what());
  }
  image.gamma = meta.at("gamma").get<double>();
  image.timestamp = meta.value("timestamp", 0.0);
  const auto na = meta.at("n_azimuth").get<std::size_t>();
  const auto nr = meta.at("n_range").get<std::size_t>();
  if (na != image.n_azimuth || nr != image.n_range)
    throw DataError(meta_path + ": sidecar dimensions do not match image");
}

}  // namespace

PolarRadarImage load_polar_png(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw DataError("cannot open " + path);

  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DataError("libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DataError(path + ": PNG decode failed");
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  // Normalize to 8-bit grayscale.
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  const png_byte color = png_get_color_type(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color & PNG_COLOR_MASK_COLOR || color == PNG_COLOR_TYPE_PALETTE)
    png_set_rgb_to_gray(png, 1, -1, -1);
  if (png_get_bit_depth(png, info) < 8) png_set_expand_gray_1_2_4_to_8(png);
  png_read_update_info(png, info);

  PolarRadarImage image;
  image.n_azimuth = png_get_image_height(png, info);
  image.n_range = png_get_image_width(png, info);
  image.id = path;
  image.intensities.resize(image.n_azimuth * image.n_range);

  std::vector<png_byte> row(png_get_rowbytes(png, info));
  for (std::size_t a = 0; a < image.n_azimuth; ++a) {
    png_read_row(png, row.data(), nullptr);
    for (std::size_t r = 0; r < image.n_range; ++r)
      image.intensities[a * image.n_range + r] = row[r];
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return image;
}

void save_polar_png(const PolarRadarImage& image, const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw DataError("cannot write " + path);

  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw DataError("libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw DataError(path + ": PNG encode failed");
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.n_range),
               static_cast<png_uint_32>(image.n_azimuth), 8,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  std::vector<png_byte> row(image.n_range);
  for (std::size_t a = 0; a < image.n_azimuth; ++a) {
    for (std::size_t r = 0; r < image.n_range; ++r) {
      const double v =
          std::round(image.intensities[a * image.n_range + r]);
      row[r] = static_cast<png_byte>(std::clamp(v, 0.0, 255.0));
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

PolarRadarImage load_polar_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open " + path);
  PolarRadarImage image;
  image.id = path;
  std::string line;
  std::size_t width = 0;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::size_t count = 0;
    while (std::getline(ss, field, ',')) {
      image.intensities.push_back(std::stod(field));
      ++count;
    }
    if (width == 0)
      width = count;
    else if (count != width)
      throw DataError(path + ": ragged CSV matrix");
    ++image.n_azimuth;
  }
  image.n_range = width;
  if (image.n_azimuth == 0 || width == 0) throw DataError(path + ": empty matrix");
  return image;
}

void save_polar_csv(const PolarRadarImage& image, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot write " + path);
  f.precision(17);
  for (std::size_t a = 0; a < image.n_azimuth; ++a) {
    for (std::size_t r = 0; r < image.n_range; ++r) {
      if (r) f << ',';
      f << image.intensities[a * image.n_range + r];
    }
    f << '\n';
  }
}

void save_polar_meta(const PolarRadarImage& image, const std::string& path) {
  nlohmann::json meta{{"gamma", image.gamma},
                      {"n_azimuth", image.n_azimuth},
                      {"n_range", image.n_range},
                      {"timestamp", image.timestamp}};
  std::ofstream f(path);
  if (!f) throw DataError("cannot write " + path);
  f << meta.dump(2) << '\n';
}

PolarRadarImage load_polar_image(const std::string& image_path,
                                 const std::string& meta_path) {
  const bool png = image_path.size() >= 4 &&
                   image_path.substr(image_path.size() - 4) == ".png";
  PolarRadarImage image =
      png ? load_polar_png(image_path) : load_polar_csv(image_path);
  apply_meta(image, meta_path);
  image.validate();
  return image;
}

}  // namespace coral
