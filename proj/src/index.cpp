#include "coral/index.hpp"

#include <algorithm>
#include <cmath>

#include "coral/kernels.hpp"

namespace coral {

namespace {

VoxelCoord cell_of(const Eigen::Vector3d& p, double cs) {
  return {static_cast<std::int64_t>(std::floor(p.x() / cs)),
          static_cast<std::int64_t>(std::floor(p.y() / cs)),
          static_cast<std::int64_t>(std::floor(p.z() / cs))};
}

}  // namespace

NeighborhoodIndex::NeighborhoodIndex(const PointCloud& cloud, double cell_size)
    : dim_(cloud.dim()), cell_size_(cell_size) {
  if (cloud.empty()) throw DataError("empty cloud");
  if (cell_size <= 0) throw ConfigError("cell size must be positive");

  const std::size_t n = cloud.size();
  std::vector<VoxelCoord> coords(n);
  for (std::size_t i = 0; i < n; ++i)
    coords[i] = cell_of(cloud.point(i), cell_size_);

  for (std::size_t i = 0; i < n; ++i) cells_[coords[i]].count += 1;
  std::uint32_t offset = 0;
  // Offsets assigned in first-seen order; within a cell points keep cloud
  // order so gathered neighbor lists are deterministic.
  std::vector<std::uint32_t> cursor(n);
  {
    std::unordered_map<VoxelCoord, std::uint32_t, VoxelCoordHash> next;
    next.reserve(cells_.size());
    for (std::size_t i = 0; i < n; ++i) {
      auto it = next.find(coords[i]);
      if (it == next.end()) {
        Cell& c = cells_[coords[i]];
        c.offset = offset;
        offset += c.count;
        it = next.emplace(coords[i], c.offset).first;
      }
      cursor[i] = it->second;
      ++it->second;
    }
  }

  xs_.resize(n);
  ys_.resize(n);
  zs_.resize(dim_ == 3 ? n : 0);
  order_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t slot = cursor[i];
    xs_[slot] = cloud.xs()[i];
    ys_[slot] = cloud.ys()[i];
    if (dim_ == 3) zs_[slot] = cloud.zs()[i];
    order_[slot] = static_cast<std::uint32_t>(i);
  }
  inverse_.resize(n);
  for (std::uint32_t s = 0; s < n; ++s) inverse_[order_[s]] = s;
}

void NeighborhoodIndex::radius_query(const Eigen::Vector3d& q, double r,
                                     std::vector<std::uint32_t>& out) const {
  out.clear();
  if (r < 0) return;
  const double r2 = r * r;
  const VoxelCoord lo = cell_of(q - Eigen::Vector3d::Constant(r), cell_size_);
  const VoxelCoord hi = cell_of(q + Eigen::Vector3d::Constant(r), cell_size_);
  const std::int64_t zlo = dim_ == 3 ? lo.z : 0;
  const std::int64_t zhi = dim_ == 3 ? hi.z : 0;

  std::vector<double> d2;
  for (std::int64_t cx = lo.x; cx <= hi.x; ++cx)
    for (std::int64_t cy = lo.y; cy <= hi.y; ++cy)
      for (std::int64_t cz = zlo; cz <= zhi; ++cz) {
        const auto it = cells_.find({cx, cy, cz});
        if (it == cells_.end()) continue;
        const Cell& c = it->second;
        d2.resize(c.count);
        if (dim_ == 3)
          kernels::squared_distances_3d(q.x(), q.y(), q.z(), xs_.data() + c.offset,
                                        ys_.data() + c.offset, zs_.data() + c.offset,
                                        c.count, d2.data());
        else
          kernels::squared_distances_2d(q.x(), q.y(), xs_.data() + c.offset,
                                        ys_.data() + c.offset, c.count, d2.data());
        for (std::uint32_t k = 0; k < c.count; ++k)
          if (d2[k] <= r2) out.push_back(order_[c.offset + k]);
      }
  std::sort(out.begin(), out.end());
}

std::vector<std::uint32_t> NeighborhoodIndex::radius_query(
    const Eigen::Vector3d& q, double r) const {
  std::vector<std::uint32_t> out;
  radius_query(q, r, out);
  return out;
}

std::size_t NeighborhoodIndex::gather_neighbors(const Eigen::Vector3d& q,
                                                double r, std::vector<double>& xs,
                                                std::vector<double>& ys,
                                                std::vector<double>& zs) const {
  thread_local std::vector<std::uint32_t> idx;
  radius_query(q, r, idx);
  // Gathered coordinates must come back in ascending source order so entropy
  // accumulation is identical between the index path and brute force. The
  // reordered buffers are cell-major, so map indices back through order_.
  xs.clear();
  ys.clear();
  zs.clear();
  for (const std::uint32_t i : idx) {
    const std::uint32_t s = inverse_[i];
    xs.push_back(xs_[s]);
    ys.push_back(ys_[s]);
    if (dim_ == 3) zs.push_back(zs_[s]);
  }
  return idx.size();
}

NeighborhoodIndex build_index(const PointCloud& cloud, double cell_size) {
  return NeighborhoodIndex(cloud, cell_size);
}

}  // namespace coral
