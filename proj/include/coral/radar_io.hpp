#pragma once
// Polar sweep loading: 8-bit grayscale PNG (rows = azimuth, cols = range)
// or CSV matrix, with a JSON sidecar {gamma, n_azimuth, n_range, timestamp}.

#include <string>

#include "coral/radar.hpp"

namespace coral {

// meta_path points at the JSON sidecar; the image extension picks the codec.
PolarRadarImage load_polar_image(const std::string& image_path,
                                 const std::string& meta_path);

PolarRadarImage load_polar_png(const std::string& path);
PolarRadarImage load_polar_csv(const std::string& path);

// Intensities are rounded and clamped to [0, 255] when writing PNG.
void save_polar_png(const PolarRadarImage& image, const std::string& path);
void save_polar_csv(const PolarRadarImage& image, const std::string& path);
void save_polar_meta(const PolarRadarImage& image, const std::string& path);

}  // namespace coral
