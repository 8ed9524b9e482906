#pragma once
// Point clouds and rigid transforms. Clouds are stored coordinate-major so
// the distance/moment kernels can run over contiguous spans.

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <vector>

#include "coral/error.hpp"

namespace coral {

class PointCloud {
 public:
  PointCloud() = default;
  explicit PointCloud(int dim) : dim_(dim) {
    if (dim != 2 && dim != 3) throw DataError("dim must be 2 or 3");
  }

  int dim() const { return dim_; }
  std::size_t size() const { return xs_.size(); }
  bool empty() const { return xs_.empty(); }

  void reserve(std::size_t n) {
    xs_.reserve(n);
    ys_.reserve(n);
    if (dim_ == 3) zs_.reserve(n);
  }

  void add(double x, double y, double z = 0.0);
  void add(const Eigen::Vector3d& p) { add(p.x(), p.y(), p.z()); }

  // z() is 0 for 2D clouds.
  Eigen::Vector3d point(std::size_t i) const {
    return {xs_[i], ys_[i], dim_ == 3 ? zs_[i] : 0.0};
  }
  void set_point(std::size_t i, const Eigen::Vector3d& p);

  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& ys() const { return ys_; }
  const std::vector<double>& zs() const { return zs_; }

  const Eigen::Vector3d& origin() const { return origin_; }
  void set_origin(const Eigen::Vector3d& o);

  // Sensor orientation; anchors voxel lattices so grid-based metrics are
  // invariant under rigid motion of the whole scene.
  const Eigen::Matrix3d& frame() const { return frame_; }
  void set_frame(const Eigen::Matrix3d& f) { frame_ = f; }

  const std::string& id() const { return id_; }
  void set_id(std::string id) { id_ = std::move(id); }

 private:
  int dim_ = 3;
  std::vector<double> xs_, ys_, zs_;
  Eigen::Vector3d origin_ = Eigen::Vector3d::Zero();
  Eigen::Matrix3d frame_ = Eigen::Matrix3d::Identity();
  std::string id_;
};

class RigidTransform {
 public:
  // Identity.
  explicit RigidTransform(int dim = 3)
      : dim_(dim),
        rotation_(Eigen::Matrix3d::Identity()),
        translation_(Eigen::Vector3d::Zero()) {}

  // rotation must be orthonormal with det +1 (checked to 1e-9). For 2D the
  // matrix acts on the xy-plane with the z row/column identity.
  RigidTransform(int dim, const Eigen::Matrix3d& rotation,
                 const Eigen::Vector3d& translation);

  static RigidTransform planar(double x, double y, double theta_rad);
  static RigidTransform rotation_z(int dim, double theta_rad);

  int dim() const { return dim_; }
  const Eigen::Matrix3d& rotation() const { return rotation_; }
  const Eigen::Vector3d& translation() const { return translation_; }

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const {
    return rotation_ * p + translation_;
  }
  RigidTransform compose(const RigidTransform& rhs) const;
  RigidTransform inverse() const;

 private:
  int dim_;
  Eigen::Matrix3d rotation_;
  Eigen::Vector3d translation_;
};

PointCloud apply_transform(const PointCloud& cloud, const RigidTransform& T);

// Displaces T_true by e_d along `direction` (unit vector) and rotates by
// e_theta about the vertical axis through the displaced sensor position.
RigidTransform perturb(const RigidTransform& T_true, double e_d,
                       const Eigen::Vector3d& direction, double e_theta);

// Misaligns a cloud in place about its own sensor origin: rotate by e_theta
// about the vertical axis through the origin, then translate by e_d*direction.
PointCloud induce_offset(const PointCloud& cloud, double e_d,
                         const Eigen::Vector3d& direction, double e_theta);

// Centroid-per-voxel downsampling (preprocessing utility).
PointCloud voxel_downsample(const PointCloud& cloud, double voxel_size);

}  // namespace coral
