#pragma once
// Uniform-grid spatial index with exact closed-ball radius queries.
// Points are bucketed per cell in coordinate-major order so queries run the
// distance kernel over contiguous spans.

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "coral/geometry.hpp"
#include "coral/voxel.hpp"

namespace coral {

class NeighborhoodIndex {
 public:
  // cell_size should be on the order of the typical query radius.
  NeighborhoodIndex(const PointCloud& cloud, double cell_size);

  // Indices (into the source cloud) of all points with |p - q| <= r,
  // ascending. Duplicates in the cloud are returned once per physical point.
  std::vector<std::uint32_t> radius_query(const Eigen::Vector3d& q,
                                          double r) const;
  void radius_query(const Eigen::Vector3d& q, double r,
                    std::vector<std::uint32_t>& out) const;

  // Neighbor coordinates gathered into reusable coordinate-major buffers;
  // returns the neighbor count. Gathered order is ascending source index.
  std::size_t gather_neighbors(const Eigen::Vector3d& q, double r,
                               std::vector<double>& xs, std::vector<double>& ys,
                               std::vector<double>& zs) const;

  int dim() const { return dim_; }
  std::size_t size() const { return order_.size(); }

 private:
  struct Cell {
    std::uint32_t offset = 0;
    std::uint32_t count = 0;
  };

  int dim_;
  double cell_size_;
  // Points reordered by cell, plus their original indices.
  std::vector<double> xs_, ys_, zs_;
  std::vector<std::uint32_t> order_;
  std::vector<std::uint32_t> inverse_;  // source index -> slot
  std::unordered_map<VoxelCoord, Cell, VoxelCoordHash> cells_;
};

NeighborhoodIndex build_index(const PointCloud& cloud, double cell_size = 0.5);

}  // namespace coral
