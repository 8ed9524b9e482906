#pragma once
// ASCII point-cloud files and pose CSVs.
//
// Cloud format: first line `PCLOUD <dim> <count> <ox> <oy> [<oz>]`,
// then one point per line as whitespace-separated decimals.
// Pose CSV: `id,x,y,theta_rad` (2D) or `id,x,y,z,qw,qx,qy,qz` (3D).

#include <string>
#include <vector>

#include "coral/geometry.hpp"

namespace coral {

PointCloud load_cloud(const std::string& path);
void save_cloud(const PointCloud& cloud, const std::string& path);

struct Pose {
  std::string id;
  RigidTransform transform;
};

std::vector<Pose> load_poses(const std::string& path);
void save_poses(const std::vector<Pose>& poses, int dim,
                const std::string& path);

}  // namespace coral
