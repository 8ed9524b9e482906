#include "coral/radar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace coral {

void PolarRadarImage::validate() const {
  if (n_azimuth < 1 || n_range < 1) throw DataError("empty radar image");
  if (intensities.size() != n_azimuth * n_range)
    throw DataError("intensity buffer size mismatch");
  if (!(gamma > 0.0)) throw DataError("gamma must be positive");
  for (const double v : intensities)
    if (!std::isfinite(v) || v < 0.0)
      throw DataError("intensities must be finite and >= 0");
}

void RadarFilterParams::validate() const {
  if (k < 1) throw ConfigError("k must be >= 1");
  if (!(z_min > 0.0)) throw ConfigError("z_min must be positive");
  if (w < 0) throw ConfigError("w must be >= 0");
  if (min_range < 0.0) throw ConfigError("min_range must be >= 0");
}

std::vector<std::uint32_t> k_strongest(std::span<const double> row, int k,
                                       double z_min) {
  std::vector<std::uint32_t> bins;
  for (std::uint32_t i = 0; i < row.size(); ++i)
    if (row[i] > z_min) bins.push_back(i + 1);
  const auto strongest = [&](std::uint32_t a, std::uint32_t b) {
    if (row[a - 1] != row[b - 1]) return row[a - 1] > row[b - 1];
    return a < b;
  };
  if (bins.size() > static_cast<std::size_t>(k)) {
    std::nth_element(bins.begin(), bins.begin() + k, bins.end(), strongest);
    bins.resize(k);
  }
  std::sort(bins.begin(), bins.end());
  return bins;
}

double region_strength(std::span<const double> row, std::uint32_t r, int w) {
  const auto n = static_cast<std::uint32_t>(row.size());
  if (r < 1 || r > n) throw DataError("range bin out of bounds");
  const std::uint32_t lo = r > static_cast<std::uint32_t>(w) ? r - w : 1;
  const std::uint32_t hi = std::min(n, r + static_cast<std::uint32_t>(w));
  double sum = 0.0;
  for (std::uint32_t i = lo; i <= hi; ++i) sum += row[i - 1];
  return sum / static_cast<double>(hi - lo + 1);
}

RipFeatureSet extract_rip(const PolarRadarImage& image,
                          const RadarFilterParams& params) {
  image.validate();
  params.validate();
  constexpr double kUnset = -1.0;

  RipFeatureSet out;
  std::vector<double> scores(image.n_range);
  for (std::size_t a = 1; a <= image.n_azimuth; ++a) {
    const auto row = image.row(a);
    const auto mask = k_strongest(row, params.k, params.z_min);
    if (mask.empty()) continue;

    std::fill(scores.begin(), scores.end(), kUnset);
    const auto n = static_cast<std::uint32_t>(image.n_range);
    auto score_at = [&](std::uint32_t r) {
      if (scores[r - 1] == kUnset)
        scores[r - 1] = region_strength(row, r, params.w);
      return scores[r - 1];
    };
    for (const std::uint32_t r : mask) {
      const std::uint32_t lo = r > static_cast<std::uint32_t>(params.w)
                                   ? r - params.w
                                   : 1;
      const std::uint32_t hi =
          std::min(n, r + static_cast<std::uint32_t>(params.w));
      for (std::uint32_t i = lo; i <= hi; ++i) score_at(i);
    }

    for (const std::uint32_t r : mask) {
      const double s = score_at(r);
      if (s <= params.z_min) continue;
      const std::uint32_t lo = r > static_cast<std::uint32_t>(params.w)
                                   ? r - params.w
                                   : 1;
      const std::uint32_t hi =
          std::min(n, r + static_cast<std::uint32_t>(params.w));
      bool is_peak = true;
      for (std::uint32_t i = lo; i <= hi && is_peak; ++i) {
        if (i == r) continue;
        const double si = score_at(i);
        if (si > s) is_peak = false;
        // Plateau rule: an equal score to the left owns the peak.
        if (i < r && si == s) is_peak = false;
      }
      if (is_peak)
        out.features.push_back({r, static_cast<std::uint32_t>(a), s});
    }
  }
  return out;
}

PointCloud to_cartesian(const RipFeatureSet& features, double gamma,
                        std::size_t n_azimuth, double min_range) {
  if (!(gamma > 0.0)) throw DataError("gamma must be positive");
  if (n_azimuth < 1) throw DataError("n_azimuth must be >= 1");
  PointCloud cloud(2);
  cloud.set_origin(Eigen::Vector3d::Zero());
  for (const RipFeature& f : features.features) {
    const double range = f.range_bin * gamma;
    if (range < min_range) continue;
    const double theta = 2.0 * std::numbers::pi * f.azimuth_bin /
                         static_cast<double>(n_azimuth);
    cloud.add(range * std::cos(theta), range * std::sin(theta));
  }
  return cloud;
}

}  // namespace coral
