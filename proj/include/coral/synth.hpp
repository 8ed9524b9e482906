#pragma once
// Deterministic synthetic scenes: desk-scale stand-ins for real lidar/radar
// sequences. Each sensor view resamples the scene surfaces with fresh noise
// so paired views overlap without sharing identical points.

#include <cstdint>
#include <vector>

#include "coral/classifier.hpp"
#include "coral/geometry.hpp"
#include "coral/radar.hpp"

namespace coral {

enum class SceneKind { kStructuredRoom, kSemiStructured, kCluttered };

SceneKind scene_kind_from_name(const std::string& name);

struct SyntheticSceneSpec {
  SceneKind kind = SceneKind::kStructuredRoom;
  int dim = 3;
  double extent = 20.0;       // room side length, meters
  double density = 40.0;      // points per m^2 of surface (2D: per meter)
  double noise_sigma = 0.02;  // meters
  std::uint64_t seed = 1;
  int n_poses = 10;
  double sensor_range = 12.0;  // view carve radius, meters

  void validate() const;
};

struct SyntheticScene {
  PointCloud map;  // noise-free geometry, world frame
  std::vector<RigidTransform> poses;
  std::vector<PointCloud> views;  // world frame, origin at the pose
};

SyntheticScene synth_scene(const SyntheticSceneSpec& spec);

// Pairs (i, j) where j is the first view at distance >= spacing from i;
// spacing 0 pairs consecutive views. T_gt is identity (views share the
// world frame); heading follows the pose displacement.
std::vector<CloudPair> make_pairs(const SyntheticScene& scene, double spacing);

// --- synthetic radar --------------------------------------------------------

struct RadarSceneSpec {
  std::size_t n_azimuth = 400;
  std::size_t n_range = 600;
  double gamma = 0.1;        // meters/bin
  int n_poses = 30;
  double pose_spacing = 1.0; // meters along +x
  int n_walls = 24;
  double noise_max = 50.0;   // uniform clutter, below z_min
  double pulse_peak = 180.0;
  std::uint64_t seed = 1;
};

struct RadarScene {
  std::vector<PolarRadarImage> sweeps;
  std::vector<RigidTransform> poses;
  PointCloud landmarks;  // dim 2, world frame
};

// Wall segments sampled into landmarks, rendered per pose as smooth range
// pulses over uniform sub-threshold noise.
RadarScene synth_radar_scene(const RadarSceneSpec& spec);

}  // namespace coral
