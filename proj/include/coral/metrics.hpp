#pragma once
// Baseline quality measures feeding the same classifier as CorAl: MME,
// CorAl-median, NDT point-to-distribution score, Rel-NDT, and
// point-to-point / point-to-line / point-to-distribution residuals over
// grid surface features.

#include <Eigen/Dense>
#include <string>
#include <unordered_map>
#include <vector>

#include "coral/entropy.hpp"
#include "coral/features.hpp"
#include "coral/geometry.hpp"
#include "coral/voxel.hpp"

namespace coral {

struct NdtCell {
  VoxelCoord coord;
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();  // regularized, population
  std::size_t count = 0;
};

// Voxelized Gaussian model of one cloud. The voxel lattice is anchored at
// the cloud's sensor pose (origin and frame), which keeps scores invariant
// when the whole scene moves rigidly.
class NdtGrid {
 public:
  NdtGrid(int dim, double voxel_size, const Eigen::Vector3d& anchor,
          const Eigen::Matrix3d& frame)
      : dim_(dim), voxel_size_(voxel_size), anchor_(anchor), frame_(frame) {}

  int dim() const { return dim_; }
  double voxel_size() const { return voxel_size_; }
  const std::vector<NdtCell>& cells() const { return cells_; }

  VoxelCoord coord_of(const Eigen::Vector3d& p) const;
  // Index into cells() or -1.
  int cell_at(const VoxelCoord& c) const;
  void add_cell(NdtCell cell);

 private:
  int dim_;
  double voxel_size_;
  Eigen::Vector3d anchor_;
  Eigen::Matrix3d frame_;
  std::vector<NdtCell> cells_;
  std::unordered_map<VoxelCoord, std::uint32_t, VoxelCoordHash> lookup_;
};

struct SurfaceFeature {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  Eigen::Vector3d normal = Eigen::Vector3d::Zero();  // unit length
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();     // regularized, population
  std::size_t count = 0;
};

struct GridSurfaceFeatures {
  int dim = 3;
  double cell_size = 0.0;
  std::vector<SurfaceFeature> features;
};

enum class ResidualKind { kPointToPoint, kPointToLine, kPointToDistribution };

// min_cell_points <= 0 means dim + 2.
NdtGrid build_ndt(const PointCloud& cloud, double voxel_size,
                  int min_cell_points = 0);

// Mean Gaussian density of the overlapping points of b under the grid.
QualityFeatureVector ndt_score(const NdtGrid& grid, const PointCloud& b);

// x1 = NDT score, x2 = mean differential entropy of the NDT cells matched by
// at least one overlapping point (each cell counted once).
QualityFeatureVector rel_ndt_features(const NdtGrid& grid, const PointCloud& b);

GridSurfaceFeatures grid_surface_features(const PointCloud& cloud,
                                          double cell_size,
                                          int min_cell_points = 0);

// One-directional nearest matching b -> a within assoc_radius; ties by index.
// x1 = summed residual, x2 = correspondence count, x3 = x1/x2.
QualityFeatureVector residual_features(const GridSurfaceFeatures& fa,
                                       const GridSurfaceFeatures& fb,
                                       ResidualKind kind, double assoc_radius);

// Point-to-point over raw feature clouds; x1 = sum |delta|^2 / match count.
QualityFeatureVector cen_p2p_features(const PointCloud& a, const PointCloud& b,
                                      double assoc_radius);

QualityFeatureVector mme_features(const PointCloud& a, const PointCloud& b,
                                  const CoralParams& params);
QualityFeatureVector coral_median_features(const PointCloud& a,
                                           const PointCloud& b,
                                           const CoralParams& params);

// --- metric registry -------------------------------------------------------

enum class MetricKind {
  kCoral,
  kCoralMedian,
  kMme,
  kNdt,
  kRelNdt,
  kCfearP2P,
  kCfearP2L,
  kCfearP2D,
  kCenP2P,
};

MetricKind metric_from_name(const std::string& name);
std::string metric_name(MetricKind kind);

struct MetricParams {
  CoralParams coral;
  double ndt_voxel = 0.0;    // 0 -> 2 * coral.r_min
  double surface_cell = 0.0; // 0 -> NDT voxel size
  double assoc_radius = 3.0;
  int min_cell_points = 0;   // 0 -> dim + 2

  double effective_ndt_voxel() const {
    return ndt_voxel > 0.0 ? ndt_voxel : 2.0 * coral.r_min;
  }
  double effective_surface_cell() const {
    return surface_cell > 0.0 ? surface_cell : effective_ndt_voxel();
  }
};

QualityFeatureVector compute_features(MetricKind kind, const PointCloud& a,
                                      const PointCloud& b,
                                      const MetricParams& params);

}  // namespace coral
