#include "coral/io.hpp"

#include <Eigen/Geometry>
#include <cmath>
#include <fstream>
#include <sstream>

namespace coral {

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open " + path);
  return f;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot write " + path);
  return f;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

}  // namespace

PointCloud load_cloud(const std::string& path) {
  std::ifstream f = open_in(path);
  std::string magic;
  int dim = 0;
  std::size_t count = 0;
  f >> magic >> dim >> count;
  if (magic != "PCLOUD") throw DataError(path + ": missing PCLOUD header");
  if (dim != 2 && dim != 3) throw DataError(path + ": dim must be 2 or 3");
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  f >> origin.x() >> origin.y();
  if (dim == 3) f >> origin.z();
  if (!f) throw DataError(path + ": malformed header");

  PointCloud cloud(dim);
  cloud.set_origin(origin);
  cloud.set_id(path);
  cloud.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    double x = 0, y = 0, z = 0;
    f >> x >> y;
    if (dim == 3) f >> z;
    if (!f) throw DataError(path + ": truncated point list");
    cloud.add(x, y, z);
  }
  return cloud;
}

void save_cloud(const PointCloud& cloud, const std::string& path) {
  std::ofstream f = open_out(path);
  f.precision(17);
  f << "PCLOUD " << cloud.dim() << ' ' << cloud.size() << ' '
    << cloud.origin().x() << ' ' << cloud.origin().y();
  if (cloud.dim() == 3) f << ' ' << cloud.origin().z();
  f << '\n';
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    f << cloud.xs()[i] << ' ' << cloud.ys()[i];
    if (cloud.dim() == 3) f << ' ' << cloud.zs()[i];
    f << '\n';
  }
}

std::vector<Pose> load_poses(const std::string& path) {
  std::ifstream f = open_in(path);
  std::vector<Pose> poses;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_csv(line);
    if (fields.size() == 4) {
      poses.push_back({fields[0], RigidTransform::planar(std::stod(fields[1]),
                                                         std::stod(fields[2]),
                                                         std::stod(fields[3]))});
    } else if (fields.size() == 8) {
      const Eigen::Quaterniond q(std::stod(fields[4]), std::stod(fields[5]),
                                 std::stod(fields[6]), std::stod(fields[7]));
      if (std::abs(q.norm() - 1.0) > 1e-6)
        throw DataError(path + ": quaternion not unit length");
      poses.push_back(
          {fields[0],
           RigidTransform(3, q.normalized().toRotationMatrix(),
                          Eigen::Vector3d(std::stod(fields[1]),
                                          std::stod(fields[2]),
                                          std::stod(fields[3])))});
    } else {
      throw DataError(path + ": pose rows need 4 (2D) or 8 (3D) fields");
    }
  }
  return poses;
}

void save_poses(const std::vector<Pose>& poses, int dim,
                const std::string& path) {
  std::ofstream f = open_out(path);
  f.precision(17);
  for (const Pose& p : poses) {
    const auto& t = p.transform.translation();
    if (dim == 2) {
      const double theta =
          std::atan2(p.transform.rotation()(1, 0), p.transform.rotation()(0, 0));
      f << p.id << ',' << t.x() << ',' << t.y() << ',' << theta << '\n';
    } else {
      const Eigen::Quaterniond q(p.transform.rotation());
      f << p.id << ',' << t.x() << ',' << t.y() << ',' << t.z() << ','
        << q.w() << ',' << q.x() << ',' << q.y() << ',' << q.z() << '\n';
    }
  }
}

}  // namespace coral
