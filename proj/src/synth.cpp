#include "coral/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace coral {

namespace {

// Engine output mapped to doubles directly so scenes are byte-identical
// across standard library implementations.
struct Rng {
  std::mt19937_64 engine;
  explicit Rng(std::uint64_t seed) : engine(seed) {}
  double uniform01() { return static_cast<double>(engine() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  double gaussian(double sigma) {
    // Box-Muller; one draw per call keeps the stream simple.
    const double u1 = std::max(uniform01(), 1e-300);
    const double u2 = uniform01();
    return sigma * std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

constexpr double kWallHeight = 3.0;

struct Patch {
  // Axis-aligned rectangle: base + u*su + v*sv, u,v in [0,1].
  Eigen::Vector3d base, su, sv;
  double area() const { return su.norm() * (sv.norm() > 0 ? sv.norm() : 1.0); }
};

std::vector<Patch> room_patches(const SyntheticSceneSpec& spec) {
  const double e = spec.extent;
  std::vector<Patch> patches;
  if (spec.dim == 2) {
    patches.push_back({{0, 0, 0}, {e, 0, 0}, {0, 0, 0}});
    patches.push_back({{0, e, 0}, {e, 0, 0}, {0, 0, 0}});
    patches.push_back({{0, 0, 0}, {0, e, 0}, {0, 0, 0}});
    patches.push_back({{e, 0, 0}, {0, e, 0}, {0, 0, 0}});
  } else {
    patches.push_back({{0, 0, 0}, {e, 0, 0}, {0, e, 0}});  // floor
    patches.push_back({{0, 0, 0}, {e, 0, 0}, {0, 0, kWallHeight}});
    patches.push_back({{0, e, 0}, {e, 0, 0}, {0, 0, kWallHeight}});
    patches.push_back({{0, 0, 0}, {0, e, 0}, {0, 0, kWallHeight}});
    patches.push_back({{e, 0, 0}, {0, e, 0}, {0, 0, kWallHeight}});
  }
  return patches;
}

void sample_patches(const std::vector<Patch>& patches, double density,
                    double sigma, int dim, Rng& rng, PointCloud& out) {
  for (const Patch& patch : patches) {
    const bool line = patch.sv.norm() == 0.0;
    const double measure = line ? patch.su.norm() : patch.area();
    const auto n = static_cast<std::size_t>(std::llround(measure * density));
    for (std::size_t i = 0; i < n; ++i) {
      Eigen::Vector3d p = patch.base + rng.uniform01() * patch.su;
      if (!line) p += rng.uniform01() * patch.sv;
      p.x() += rng.gaussian(sigma);
      p.y() += rng.gaussian(sigma);
      if (dim == 3) p.z() += rng.gaussian(sigma);
      out.add(p);
    }
  }
}

struct Cluster {
  Eigen::Vector3d center;
  double sigma;
};

std::vector<Cluster> make_clusters(const SyntheticSceneSpec& spec, Rng& rng) {
  // Tight blobs (poles, bushes): crisp enough that small offsets blur them.
  const auto n = static_cast<std::size_t>(
      std::max(20.0, std::round(spec.extent * spec.extent / 3.0)));
  std::vector<Cluster> clusters;
  clusters.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::Vector3d c(rng.uniform(0.0, spec.extent),
                      rng.uniform(0.0, spec.extent), 0.0);
    if (spec.dim == 3) c.z() = rng.uniform(0.2, 2.0);
    clusters.push_back({c, 0.06});
  }
  return clusters;
}

void sample_clusters(const std::vector<Cluster>& clusters, double density,
                     double sigma, int dim, Rng& rng, PointCloud& out) {
  const auto per_cluster = static_cast<std::size_t>(std::llround(density));
  for (const Cluster& cluster : clusters) {
    for (std::size_t i = 0; i < per_cluster; ++i) {
      Eigen::Vector3d p = cluster.center;
      p.x() += rng.gaussian(cluster.sigma) + rng.gaussian(sigma);
      p.y() += rng.gaussian(cluster.sigma) + rng.gaussian(sigma);
      if (dim == 3) p.z() += rng.gaussian(cluster.sigma) + rng.gaussian(sigma);
      out.add(p);
    }
  }
}

PointCloud sample_scene(const SyntheticSceneSpec& spec,
                        const std::vector<Cluster>& clusters,
                        std::uint64_t seed) {
  Rng rng(seed);
  PointCloud cloud(spec.dim);
  switch (spec.kind) {
    case SceneKind::kStructuredRoom:
      sample_patches(room_patches(spec), spec.density, spec.noise_sigma,
                     spec.dim, rng, cloud);
      break;
    case SceneKind::kSemiStructured:
      sample_patches(room_patches(spec), 0.5 * spec.density, spec.noise_sigma,
                     spec.dim, rng, cloud);
      sample_clusters(clusters, 0.5 * spec.density, spec.noise_sigma, spec.dim,
                      rng, cloud);
      break;
    case SceneKind::kCluttered:
      sample_clusters(clusters, spec.density, spec.noise_sigma, spec.dim, rng,
                      cloud);
      break;
  }
  return cloud;
}

PointCloud carve(const PointCloud& cloud, const Eigen::Vector3d& position,
                 double range) {
  PointCloud view(cloud.dim());
  const double r2 = range * range;
  for (std::size_t i = 0; i < cloud.size(); ++i)
    if ((cloud.point(i) - position).squaredNorm() <= r2)
      view.add(cloud.point(i));
  view.set_origin(position);
  return view;
}

}  // namespace

SceneKind scene_kind_from_name(const std::string& name) {
  if (name == "structured-room") return SceneKind::kStructuredRoom;
  if (name == "semi-structured") return SceneKind::kSemiStructured;
  if (name == "cluttered") return SceneKind::kCluttered;
  throw ConfigError("unknown scene kind: " + name);
}

void SyntheticSceneSpec::validate() const {
  if (dim != 2 && dim != 3) throw ConfigError("scene dim must be 2 or 3");
  if (!(density > 0.0)) throw ConfigError("density must be positive");
  if (noise_sigma < 0.0) throw ConfigError("noise sigma must be >= 0");
  if (!(extent > 0.0)) throw ConfigError("extent must be positive");
  if (n_poses < 1) throw ConfigError("need at least one pose");
  if (!(sensor_range > 0.0)) throw ConfigError("sensor range must be positive");
}

SyntheticScene synth_scene(const SyntheticSceneSpec& spec) {
  spec.validate();
  Rng cluster_rng(mix_seed(spec.seed, 0));
  const std::vector<Cluster> clusters = make_clusters(spec, cluster_rng);

  SyntheticScene scene;
  scene.map = sample_scene(spec, clusters, mix_seed(spec.seed, 1));
  scene.map.set_origin(Eigen::Vector3d(spec.extent / 2.0, spec.extent / 2.0,
                                       spec.dim == 3 ? 1.2 : 0.0));
  scene.map.set_id("map");

  for (int i = 0; i < spec.n_poses; ++i) {
    const double t =
        spec.n_poses > 1 ? static_cast<double>(i) / (spec.n_poses - 1) : 0.5;
    const Eigen::Vector3d position(spec.extent * (0.15 + 0.7 * t),
                                   spec.extent / 2.0,
                                   spec.dim == 3 ? 1.2 : 0.0);
    RigidTransform pose(spec.dim);
    pose = RigidTransform(spec.dim, Eigen::Matrix3d::Identity(), position);
    scene.poses.push_back(pose);

    PointCloud full =
        sample_scene(spec, clusters, mix_seed(spec.seed, 100 + i));
    PointCloud view = carve(full, position, spec.sensor_range);
    view.set_id("view-" + std::to_string(i));
    scene.views.push_back(std::move(view));
  }
  return scene;
}

std::vector<CloudPair> make_pairs(const SyntheticScene& scene, double spacing) {
  std::vector<CloudPair> pairs;
  for (std::size_t i = 0; i + 1 < scene.views.size(); ++i) {
    std::size_t j = i + 1;
    while (j < scene.views.size() &&
           (scene.poses[j].translation() - scene.poses[i].translation()).norm() <
               spacing)
      ++j;
    if (j >= scene.views.size()) break;
    CloudPair pair;
    pair.a = scene.views[i];
    pair.b = scene.views[j];
    pair.T_gt = RigidTransform(pair.a.dim());
    Eigen::Vector3d heading =
        scene.poses[j].translation() - scene.poses[i].translation();
    heading.z() = 0.0;
    pair.heading = heading.norm() > 1e-12 ? heading.normalized()
                                          : Eigen::Vector3d::UnitX();
    pair.id = scene.views[i].id() + "/" + scene.views[j].id();
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

RadarScene synth_radar_scene(const RadarSceneSpec& spec) {
  if (spec.n_azimuth < 1 || spec.n_range < 1 || !(spec.gamma > 0.0))
    throw ConfigError("invalid radar scene spec");
  Rng rng(mix_seed(spec.seed, 7));

  RadarScene scene;
  scene.landmarks = PointCloud(2);

  // Wall segments flanking a straight trajectory along +x.
  const double traj_len = spec.pose_spacing * (spec.n_poses - 1);
  for (int wall = 0; wall < spec.n_walls; ++wall) {
    const double cx = rng.uniform(-10.0, traj_len + 10.0);
    const double cy = (wall % 2 == 0 ? 1.0 : -1.0) * rng.uniform(4.0, 22.0);
    const double len = rng.uniform(4.0, 10.0);
    const double phi = rng.uniform(0.0, std::numbers::pi);
    const Eigen::Vector3d dir(std::cos(phi), std::sin(phi), 0.0);
    const Eigen::Vector3d start(cx - 0.5 * len * dir.x(),
                                cy - 0.5 * len * dir.y(), 0.0);
    const auto n_pts = static_cast<std::size_t>(std::floor(len / 0.25)) + 1;
    for (std::size_t i = 0; i < n_pts; ++i)
      scene.landmarks.add(Eigen::Vector3d(start + 0.25 * i * dir));
  }

  const double max_range = spec.gamma * static_cast<double>(spec.n_range);
  for (int p = 0; p < spec.n_poses; ++p) {
    const Eigen::Vector3d position(spec.pose_spacing * p, 0.0, 0.0);
    scene.poses.emplace_back(2, Eigen::Matrix3d::Identity(), position);

    PolarRadarImage image;
    image.n_azimuth = spec.n_azimuth;
    image.n_range = spec.n_range;
    image.gamma = spec.gamma;
    image.id = "sweep-" + std::to_string(p);
    image.timestamp = static_cast<double>(p);
    image.intensities.resize(spec.n_azimuth * spec.n_range);

    Rng noise_rng(mix_seed(spec.seed, 1000 + p));
    for (double& v : image.intensities)
      v = noise_rng.uniform(0.0, spec.noise_max);

    for (std::size_t l = 0; l < scene.landmarks.size(); ++l) {
      const Eigen::Vector3d delta = scene.landmarks.point(l) - position;
      const double d = delta.head<2>().norm();
      if (d < spec.gamma || d > 0.95 * max_range) continue;
      double theta = std::atan2(delta.y(), delta.x());
      if (theta < 0) theta += 2.0 * std::numbers::pi;
      auto abin = static_cast<std::int64_t>(std::llround(
          theta * static_cast<double>(spec.n_azimuth) /
          (2.0 * std::numbers::pi)));
      if (abin <= 0) abin += static_cast<std::int64_t>(spec.n_azimuth);
      if (abin > static_cast<std::int64_t>(spec.n_azimuth))
        abin -= static_cast<std::int64_t>(spec.n_azimuth);
      const auto rbin = static_cast<std::int64_t>(std::llround(d / spec.gamma));
      for (std::int64_t dr = -3; dr <= 3; ++dr) {
        const std::int64_t r = rbin + dr;
        if (r < 1 || r > static_cast<std::int64_t>(spec.n_range)) continue;
        const double pulse =
            spec.pulse_peak * std::exp(-static_cast<double>(dr * dr) / 2.25);
        double& cell = image.intensities[(abin - 1) * spec.n_range + (r - 1)];
        cell = std::min(255.0, std::max(cell, pulse));
      }
    }
    scene.sweeps.push_back(std::move(image));
  }
  return scene;
}

}  // namespace coral
