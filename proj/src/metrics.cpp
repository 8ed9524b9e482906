#include "coral/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "coral/index.hpp"

namespace coral {

namespace {

const double kTwoPiE = 2.0 * std::numbers::pi * std::numbers::e;

// Eigenvalue flooring at 1e-3 * lambda_max (plus a tiny absolute floor so a
// fully degenerate cell still yields a positive-definite matrix).
Eigen::Matrix3d regularize(const Eigen::Matrix3d& cov, int dim) {
  Eigen::Matrix3d out = Eigen::Matrix3d::Zero();
  if (dim == 2) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov.topLeftCorner<2, 2>());
    const double floor_v = std::max(1e-3 * eig.eigenvalues().maxCoeff(), 1e-12);
    const Eigen::Vector2d vals = eig.eigenvalues().cwiseMax(floor_v);
    out.topLeftCorner<2, 2>() =
        eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    const double floor_v = std::max(1e-3 * eig.eigenvalues().maxCoeff(), 1e-12);
    const Eigen::Vector3d vals = eig.eigenvalues().cwiseMax(floor_v);
    out = eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();
  }
  return out;
}

double determinant(const Eigen::Matrix3d& cov, int dim) {
  return dim == 2 ? cov.topLeftCorner<2, 2>().determinant()
                  : cov.determinant();
}

double gaussian_density(const Eigen::Vector3d& delta, const Eigen::Matrix3d& cov,
                        int dim) {
  if (dim == 2) {
    const Eigen::Matrix2d c = cov.topLeftCorner<2, 2>();
    const Eigen::Vector2d d = delta.head<2>();
    const double det = c.determinant();
    const double maha = d.dot(c.inverse() * d);
    return std::exp(-0.5 * maha) /
           (2.0 * std::numbers::pi * std::sqrt(det));
  }
  const double det = cov.determinant();
  const double maha = delta.dot(cov.inverse() * delta);
  return std::exp(-0.5 * maha) /
         (std::pow(2.0 * std::numbers::pi, 1.5) * std::sqrt(det));
}

struct CellAccumulator {
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  Eigen::Matrix3d outer = Eigen::Matrix3d::Zero();
  std::size_t n = 0;
};

// Points grouped by sensor-frame voxel, in first-seen order.
std::vector<std::pair<VoxelCoord, CellAccumulator>> group_by_voxel(
    const PointCloud& cloud, double cell_size) {
  if (!(cell_size > 0.0)) throw ConfigError("cell size must be positive");
  const Eigen::Matrix3d to_sensor = cloud.frame().transpose();
  std::unordered_map<VoxelCoord, std::size_t, VoxelCoordHash> lookup;
  std::vector<std::pair<VoxelCoord, CellAccumulator>> groups;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Eigen::Vector3d p = cloud.point(i);
    const Eigen::Vector3d q = to_sensor * (p - cloud.origin());
    const VoxelCoord c{
        static_cast<std::int64_t>(std::floor(q.x() / cell_size)),
        static_cast<std::int64_t>(std::floor(q.y() / cell_size)),
        cloud.dim() == 3
            ? static_cast<std::int64_t>(std::floor(q.z() / cell_size))
            : 0};
    auto [it, inserted] = lookup.try_emplace(c, groups.size());
    if (inserted) groups.emplace_back(c, CellAccumulator{});
    CellAccumulator& acc = groups[it->second].second;
    acc.sum += p;
    acc.outer += p * p.transpose();
    acc.n += 1;
  }
  return groups;
}

}  // namespace

VoxelCoord NdtGrid::coord_of(const Eigen::Vector3d& p) const {
  const Eigen::Vector3d q = frame_.transpose() * (p - anchor_);
  return {static_cast<std::int64_t>(std::floor(q.x() / voxel_size_)),
          static_cast<std::int64_t>(std::floor(q.y() / voxel_size_)),
          dim_ == 3 ? static_cast<std::int64_t>(std::floor(q.z() / voxel_size_))
                    : 0};
}

int NdtGrid::cell_at(const VoxelCoord& c) const {
  const auto it = lookup_.find(c);
  return it == lookup_.end() ? -1 : static_cast<int>(it->second);
}

void NdtGrid::add_cell(NdtCell cell) {
  lookup_.emplace(cell.coord, static_cast<std::uint32_t>(cells_.size()));
  cells_.push_back(std::move(cell));
}

NdtGrid build_ndt(const PointCloud& cloud, double voxel_size,
                  int min_cell_points) {
  if (cloud.empty()) throw DataError("empty cloud");
  const int min_pts =
      min_cell_points > 0 ? min_cell_points : cloud.dim() + 2;

  NdtGrid grid(cloud.dim(), voxel_size, cloud.origin(), cloud.frame());
  for (const auto& [coord, acc] : group_by_voxel(cloud, voxel_size)) {
    if (acc.n < static_cast<std::size_t>(min_pts)) continue;
    const double inv = 1.0 / static_cast<double>(acc.n);
    NdtCell cell;
    cell.coord = coord;
    cell.count = acc.n;
    cell.mean = acc.sum * inv;
    cell.cov = regularize(
        acc.outer * inv - cell.mean * cell.mean.transpose(), cloud.dim());
    grid.add_cell(std::move(cell));
  }
  if (grid.cells().empty())
    throw DataError("no voxel reached the minimum point count");
  return grid;
}

namespace {

// Nearest overlapping cell (by cell-mean distance) for each point of b, or
// -1 for non-overlapping points.
std::vector<int> nearest_cells(const NdtGrid& grid, const PointCloud& b) {
  std::vector<int> nearest(b.size(), -1);
  const int dim = grid.dim();
  for (std::size_t i = 0; i < b.size(); ++i) {
    const Eigen::Vector3d p = b.point(i);
    const VoxelCoord c = grid.coord_of(p);
    int best = -1;
    double best_d2 = std::numeric_limits<double>::infinity();
    const std::int64_t zspan = dim == 3 ? 1 : 0;
    for (std::int64_t dx = -1; dx <= 1; ++dx)
      for (std::int64_t dy = -1; dy <= 1; ++dy)
        for (std::int64_t dz = -zspan; dz <= zspan; ++dz) {
          const int idx = grid.cell_at({c.x + dx, c.y + dy, c.z + dz});
          if (idx < 0) continue;
          const double d2 = (p - grid.cells()[idx].mean).squaredNorm();
          if (d2 < best_d2 || (d2 == best_d2 && idx < best)) {
            best_d2 = d2;
            best = idx;
          }
        }
    nearest[i] = best;
  }
  return nearest;
}

}  // namespace

QualityFeatureVector ndt_score(const NdtGrid& grid, const PointCloud& b) {
  if (grid.dim() != b.dim()) throw DataError("dim mismatch");
  const std::vector<int> nearest = nearest_cells(grid, b);
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (nearest[i] < 0) continue;
    const NdtCell& cell = grid.cells()[nearest[i]];
    sum += gaussian_density(b.point(i) - cell.mean, cell.cov, grid.dim());
    ++n;
  }
  if (n == 0) throw DataError("no overlap");
  return {sum / static_cast<double>(n), 0.0, 0.0, 1};
}

QualityFeatureVector rel_ndt_features(const NdtGrid& grid,
                                      const PointCloud& b) {
  if (grid.dim() != b.dim()) throw DataError("dim mismatch");
  const std::vector<int> nearest = nearest_cells(grid, b);
  double sum = 0.0;
  std::size_t n = 0;
  std::vector<bool> used(grid.cells().size(), false);
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (nearest[i] < 0) continue;
    const NdtCell& cell = grid.cells()[nearest[i]];
    sum += gaussian_density(b.point(i) - cell.mean, cell.cov, grid.dim());
    used[nearest[i]] = true;
    ++n;
  }
  if (n == 0) throw DataError("no overlap");

  double entropy_sum = 0.0;
  std::size_t n_cells = 0;
  for (std::size_t c = 0; c < used.size(); ++c) {
    if (!used[c]) continue;
    const double det = determinant(grid.cells()[c].cov, grid.dim());
    entropy_sum += 0.5 * std::log(std::pow(kTwoPiE, grid.dim()) * det);
    ++n_cells;
  }
  return {sum / static_cast<double>(n),
          entropy_sum / static_cast<double>(n_cells), 0.0, 2};
}

GridSurfaceFeatures grid_surface_features(const PointCloud& cloud,
                                          double cell_size,
                                          int min_cell_points) {
  if (cloud.empty()) throw DataError("empty cloud");
  const int min_pts =
      min_cell_points > 0 ? min_cell_points : cloud.dim() + 2;

  GridSurfaceFeatures out;
  out.dim = cloud.dim();
  out.cell_size = cell_size;
  for (const auto& [coord, acc] : group_by_voxel(cloud, cell_size)) {
    if (acc.n < static_cast<std::size_t>(min_pts)) continue;
    const double inv = 1.0 / static_cast<double>(acc.n);
    SurfaceFeature f;
    f.count = acc.n;
    f.mean = acc.sum * inv;
    const Eigen::Matrix3d cov = acc.outer * inv - f.mean * f.mean.transpose();
    f.cov = regularize(cov, cloud.dim());

    if (cloud.dim() == 2) {
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(
          cov.topLeftCorner<2, 2>());
      f.normal.head<2>() = eig.eigenvectors().col(0);  // smallest eigenvalue
      f.normal.z() = 0.0;
    } else {
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
      f.normal = eig.eigenvectors().col(0);
    }
    // Point toward the sensor; break the degenerate case deterministically.
    const double toward = f.normal.dot(cloud.origin() - f.mean);
    if (toward < 0.0 ||
        (toward == 0.0 &&
         (f.normal.x() < 0.0 ||
          (f.normal.x() == 0.0 &&
           (f.normal.y() < 0.0 ||
            (f.normal.y() == 0.0 && f.normal.z() < 0.0))))))
      f.normal = -f.normal;
    out.features.push_back(std::move(f));
  }
  if (out.features.empty())
    throw DataError("no cell reached the minimum point count");
  return out;
}

QualityFeatureVector residual_features(const GridSurfaceFeatures& fa,
                                       const GridSurfaceFeatures& fb,
                                       ResidualKind kind, double assoc_radius) {
  if (fa.dim != fb.dim) throw DataError("dim mismatch");
  const double r2 = assoc_radius * assoc_radius;
  double sum = 0.0;
  std::size_t count = 0;
  for (const SurfaceFeature& b : fb.features) {
    int best = -1;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < fa.features.size(); ++i) {
      const double d2 = (fa.features[i].mean - b.mean).squaredNorm();
      if (d2 <= r2 && d2 < best_d2) {
        best_d2 = d2;
        best = static_cast<int>(i);
      }
    }
    if (best < 0) continue;
    const SurfaceFeature& a = fa.features[best];
    const Eigen::Vector3d delta = b.mean - a.mean;
    switch (kind) {
      case ResidualKind::kPointToPoint:
        sum += delta.squaredNorm();
        break;
      case ResidualKind::kPointToLine: {
        const double proj = a.normal.dot(delta);
        sum += proj * proj;
        break;
      }
      case ResidualKind::kPointToDistribution:
        if (fa.dim == 2) {
          const Eigen::Vector2d d = delta.head<2>();
          sum += d.dot(a.cov.topLeftCorner<2, 2>().inverse() * d);
        } else {
          sum += delta.dot(a.cov.inverse() * delta);
        }
        break;
    }
    ++count;
  }
  if (count == 0) throw DataError("zero correspondences");
  return {sum, static_cast<double>(count), sum / static_cast<double>(count), 3};
}

QualityFeatureVector cen_p2p_features(const PointCloud& a, const PointCloud& b,
                                      double assoc_radius) {
  if (a.dim() != b.dim()) throw DataError("dim mismatch");
  if (a.empty() || b.empty()) throw DataError("empty cloud");
  const NeighborhoodIndex index(a, assoc_radius);
  double sum = 0.0;
  std::size_t count = 0;
  std::vector<std::uint32_t> idx;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const Eigen::Vector3d p = b.point(i);
    index.radius_query(p, assoc_radius, idx);
    if (idx.empty()) continue;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (const std::uint32_t j : idx)
      best_d2 = std::min(best_d2, (a.point(j) - p).squaredNorm());
    sum += best_d2;
    ++count;
  }
  if (count == 0) throw DataError("zero matches");
  return {sum / static_cast<double>(count), 0.0, 0.0, 1};
}

QualityFeatureVector mme_features(const PointCloud& a, const PointCloud& b,
                                  const CoralParams& params) {
  CoralParams p = params;
  p.aggregate = CoralParams::Aggregate::kMean;
  const QualityResult q = coral_quality(a, b, p);
  return {q.H_joint, 0.0, 0.0, 1};
}

QualityFeatureVector coral_median_features(const PointCloud& a,
                                           const PointCloud& b,
                                           const CoralParams& params) {
  CoralParams p = params;
  p.aggregate = CoralParams::Aggregate::kMedian;
  return coral_features(a, b, p);
}

MetricKind metric_from_name(const std::string& name) {
  if (name == "coral") return MetricKind::kCoral;
  if (name == "coral-median") return MetricKind::kCoralMedian;
  if (name == "mme") return MetricKind::kMme;
  if (name == "ndt") return MetricKind::kNdt;
  if (name == "rel-ndt") return MetricKind::kRelNdt;
  if (name == "cfear-p2p") return MetricKind::kCfearP2P;
  if (name == "cfear-p2l") return MetricKind::kCfearP2L;
  if (name == "cfear-p2d") return MetricKind::kCfearP2D;
  if (name == "cen-p2p") return MetricKind::kCenP2P;
  throw ConfigError("unknown metric: " + name);
}

std::string metric_name(MetricKind kind) {
  switch (kind) {
    case MetricKind::kCoral: return "coral";
    case MetricKind::kCoralMedian: return "coral-median";
    case MetricKind::kMme: return "mme";
    case MetricKind::kNdt: return "ndt";
    case MetricKind::kRelNdt: return "rel-ndt";
    case MetricKind::kCfearP2P: return "cfear-p2p";
    case MetricKind::kCfearP2L: return "cfear-p2l";
    case MetricKind::kCfearP2D: return "cfear-p2d";
    case MetricKind::kCenP2P: return "cen-p2p";
  }
  throw ConfigError("unknown metric kind");
}

QualityFeatureVector compute_features(MetricKind kind, const PointCloud& a,
                                      const PointCloud& b,
                                      const MetricParams& params) {
  switch (kind) {
    case MetricKind::kCoral:
      return coral_features(a, b, params.coral);
    case MetricKind::kCoralMedian:
      return coral_median_features(a, b, params.coral);
    case MetricKind::kMme:
      return mme_features(a, b, params.coral);
    case MetricKind::kNdt:
      return ndt_score(
          build_ndt(a, params.effective_ndt_voxel(), params.min_cell_points), b);
    case MetricKind::kRelNdt:
      return rel_ndt_features(
          build_ndt(a, params.effective_ndt_voxel(), params.min_cell_points), b);
    case MetricKind::kCfearP2P:
    case MetricKind::kCfearP2L:
    case MetricKind::kCfearP2D: {
      const GridSurfaceFeatures fa = grid_surface_features(
          a, params.effective_surface_cell(), params.min_cell_points);
      const GridSurfaceFeatures fb = grid_surface_features(
          b, params.effective_surface_cell(), params.min_cell_points);
      const ResidualKind rk = kind == MetricKind::kCfearP2P
                                  ? ResidualKind::kPointToPoint
                                  : kind == MetricKind::kCfearP2L
                                        ? ResidualKind::kPointToLine
                                        : ResidualKind::kPointToDistribution;
      return residual_features(fa, fb, rk, params.assoc_radius);
    }
    case MetricKind::kCenP2P:
      return cen_p2p_features(a, b, params.assoc_radius);
  }
  throw ConfigError("unknown metric kind");
}

}  // namespace coral
