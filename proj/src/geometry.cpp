#include "coral/geometry.hpp"

#include <cmath>
#include <cstdint>
#include <unordered_map>

#include "coral/voxel.hpp"

namespace coral {

namespace {

bool finite3(const Eigen::Vector3d& v) {
  return std::isfinite(v.x()) && std::isfinite(v.y()) && std::isfinite(v.z());
}

}  // namespace

void PointCloud::add(double x, double y, double z) {
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z))
    throw DataError("non-finite point coordinate");
  xs_.push_back(x);
  ys_.push_back(y);
  if (dim_ == 3) zs_.push_back(z);
}

void PointCloud::set_point(std::size_t i, const Eigen::Vector3d& p) {
  if (!finite3(p)) throw DataError("non-finite point coordinate");
  xs_[i] = p.x();
  ys_[i] = p.y();
  if (dim_ == 3) zs_[i] = p.z();
}

void PointCloud::set_origin(const Eigen::Vector3d& o) {
  if (!finite3(o)) throw DataError("non-finite origin");
  origin_ = o;
}

RigidTransform::RigidTransform(int dim, const Eigen::Matrix3d& rotation,
                               const Eigen::Vector3d& translation)
    : dim_(dim), rotation_(rotation), translation_(translation) {
  if (dim != 2 && dim != 3) throw DataError("dim must be 2 or 3");
  const Eigen::Matrix3d err =
      rotation * rotation.transpose() - Eigen::Matrix3d::Identity();
  if (err.cwiseAbs().maxCoeff() > 1e-9 ||
      std::abs(rotation.determinant() - 1.0) > 1e-9)
    throw DataError("rotation is not orthonormal with det +1");
  if (dim == 2) {
    if ((std::abs(rotation(2, 2) - 1.0) > 1e-12) ||
        rotation.block<1, 2>(2, 0).cwiseAbs().maxCoeff() > 1e-12 ||
        rotation.block<2, 1>(0, 2).cwiseAbs().maxCoeff() > 1e-12 ||
        std::abs(translation.z()) > 1e-12)
      throw DataError("2D transform must act in the xy-plane");
  }
}

RigidTransform RigidTransform::planar(double x, double y, double theta_rad) {
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
  const double c = std::cos(theta_rad), s = std::sin(theta_rad);
  R(0, 0) = c;
  R(0, 1) = -s;
  R(1, 0) = s;
  R(1, 1) = c;
  return {2, R, Eigen::Vector3d(x, y, 0.0)};
}

RigidTransform RigidTransform::rotation_z(int dim, double theta_rad) {
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
  const double c = std::cos(theta_rad), s = std::sin(theta_rad);
  R(0, 0) = c;
  R(0, 1) = -s;
  R(1, 0) = s;
  R(1, 1) = c;
  return {dim, R, Eigen::Vector3d::Zero()};
}

RigidTransform RigidTransform::compose(const RigidTransform& rhs) const {
  if (dim_ != rhs.dim_) throw DataError("dim mismatch");
  return {dim_, rotation_ * rhs.rotation_,
          rotation_ * rhs.translation_ + translation_};
}

RigidTransform RigidTransform::inverse() const {
  const Eigen::Matrix3d Rt = rotation_.transpose();
  return {dim_, Rt, -(Rt * translation_)};
}

PointCloud apply_transform(const PointCloud& cloud, const RigidTransform& T) {
  if (cloud.dim() != T.dim()) throw DataError("dim mismatch");
  PointCloud out(cloud.dim());
  out.set_id(cloud.id());
  out.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) out.add(T.apply(cloud.point(i)));
  out.set_origin(T.apply(cloud.origin()));
  out.set_frame(T.rotation() * cloud.frame());
  return out;
}

RigidTransform perturb(const RigidTransform& T_true, double e_d,
                       const Eigen::Vector3d& direction, double e_theta) {
  if (e_d != 0.0 && std::abs(direction.norm() - 1.0) > 1e-9)
    throw DataError("direction must be a unit vector");
  const RigidTransform rot = RigidTransform::rotation_z(T_true.dim(), e_theta);
  return {T_true.dim(), rot.rotation() * T_true.rotation(),
          T_true.translation() + e_d * direction};
}

PointCloud induce_offset(const PointCloud& cloud, double e_d,
                         const Eigen::Vector3d& direction, double e_theta) {
  if (e_d != 0.0 && std::abs(direction.norm() - 1.0) > 1e-9)
    throw DataError("direction must be a unit vector");
  const Eigen::Matrix3d R =
      RigidTransform::rotation_z(cloud.dim(), e_theta).rotation();
  const Eigen::Vector3d o = cloud.origin();
  const Eigen::Vector3d shift = e_d * direction;
  PointCloud out(cloud.dim());
  out.set_id(cloud.id());
  out.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i)
    out.add(Eigen::Vector3d(R * (cloud.point(i) - o) + o + shift));
  out.set_origin(o + shift);
  out.set_frame(R * cloud.frame());
  return out;
}

PointCloud voxel_downsample(const PointCloud& cloud, double voxel_size) {
  if (voxel_size <= 0) throw ConfigError("voxel size must be positive");
  struct Acc {
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    std::size_t n = 0;
  };
  std::unordered_map<VoxelCoord, Acc, VoxelCoordHash> cells;
  auto key = [&](const Eigen::Vector3d& p) {
    return VoxelCoord{
        static_cast<std::int64_t>(std::floor(p.x() / voxel_size)),
        static_cast<std::int64_t>(std::floor(p.y() / voxel_size)),
        static_cast<std::int64_t>(std::floor(p.z() / voxel_size))};
  };
  std::vector<VoxelCoord> order;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto k = key(cloud.point(i));
    auto [it, inserted] = cells.try_emplace(k);
    if (inserted) order.push_back(k);
    it->second.sum += cloud.point(i);
    it->second.n += 1;
  }
  PointCloud out(cloud.dim());
  out.set_id(cloud.id());
  out.set_origin(cloud.origin());
  out.set_frame(cloud.frame());
  out.reserve(order.size());
  for (const auto k : order) {
    const Acc& a = cells.at(k);
    out.add(Eigen::Vector3d(a.sum / static_cast<double>(a.n)));
  }
  return out;
}

}  // namespace coral
