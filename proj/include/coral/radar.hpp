#pragma once
// Polar FMCW radar sweeps and RIP (Radar Intensity Peaks) extraction:
// per azimuth, the k strongest range bins above the noise floor are masked,
// then bins whose windowed mean intensity is a local maximum become features.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "coral/geometry.hpp"

namespace coral {

struct PolarRadarImage {
  std::size_t n_azimuth = 0;  // rows
  std::size_t n_range = 0;    // columns
  std::vector<double> intensities;  // row-major, finite and >= 0
  double gamma = 0.0;               // range resolution, meters/bin
  std::string id;
  double timestamp = 0.0;

  // a, r are 1-based bin numbers.
  double at(std::size_t a, std::size_t r) const {
    return intensities[(a - 1) * n_range + (r - 1)];
  }
  std::span<const double> row(std::size_t a) const {
    return {intensities.data() + (a - 1) * n_range, n_range};
  }
  void validate() const;
};

struct RadarFilterParams {
  int k = 12;            // masked bins per azimuth
  double z_min = 70.0;   // noise floor, intensity units
  int w = 2;             // window half-width, bins
  double min_range = 2.5;  // meters

  void validate() const;
};

struct RipFeature {
  std::uint32_t range_bin = 0;    // 1-based
  std::uint32_t azimuth_bin = 0;  // 1-based
  double strength = 0.0;          // windowed mean intensity
};

struct RipFeatureSet {
  std::vector<RipFeature> features;  // ascending azimuth, then range
};

// Up-to-k 1-based bins with the highest intensity above z_min, ties broken
// by lower range bin. Result is ascending.
std::vector<std::uint32_t> k_strongest(std::span<const double> row, int k,
                                       double z_min);

// Mean of row[r-w .. r+w], window clamped to [1, N_r], divided by the
// clamped bin count.
double region_strength(std::span<const double> row, std::uint32_t r, int w);

RipFeatureSet extract_rip(const PolarRadarImage& image,
                          const RadarFilterParams& params);

// (r, a) -> (r*gamma*cos(theta), r*gamma*sin(theta)), theta = 2*pi*a/N_a.
// Features closer than min_range are dropped. Origin is (0, 0).
PointCloud to_cartesian(const RipFeatureSet& features, double gamma,
                        std::size_t n_azimuth, double min_range);

}  // namespace coral
