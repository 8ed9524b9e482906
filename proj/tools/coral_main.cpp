// coral: point-cloud alignment quality assessment and classification.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <numbers>

#include "coral/eval.hpp"
#include "coral/io.hpp"
#include "coral/radar_io.hpp"

namespace {

using nlohmann::json;

json load_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw coral::ConfigError("cannot open " + path);
  try {
    json j;
    f >> j;
    return j;
  } catch (const json::exception& e) {
    throw coral::ConfigError(path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw coral::DataError("cannot write " + path);
  f << text;
}

void emit(const json& j, const std::string& out_path) {
  if (out_path.empty())
    std::cout << j.dump(2) << '\n';
  else
    write_text(out_path, j.dump(2) + "\n");
}

coral::MetricParams params_from_file(const std::string& path) {
  coral::MetricParams params;
  if (path.empty()) return params;
  const json j = load_json(path);
  params.coral.r_min = j.value("r_min", params.coral.r_min);
  params.coral.r_max = j.value("r_max", params.coral.r_max);
  params.coral.alpha = j.value("alpha_deg", 0.0) * std::numbers::pi / 180.0;
  params.coral.epsilon = j.value("epsilon", params.coral.epsilon);
  params.coral.e_reject = j.value("e_reject", params.coral.e_reject);
  params.coral.min_neighbors = j.value("min_neighbors", 0);
  if (j.value("aggregate", "mean") == std::string("median"))
    params.coral.aggregate = coral::CoralParams::Aggregate::kMedian;
  params.ndt_voxel = j.value("ndt_voxel", 0.0);
  params.surface_cell = j.value("surface_cell", 0.0);
  params.assoc_radius = j.value("assoc_radius", 3.0);
  params.min_cell_points = j.value("min_cell_points", 0);
  return params;
}

std::vector<coral::CloudPair> pairs_from_manifest_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw coral::DataError("cannot open " + path);
  std::vector<coral::CloudPair> pairs;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw coral::DataError(path + ": manifest rows need two cloud paths");
    coral::CloudPair pair;
    pair.a = coral::load_cloud(line.substr(0, comma));
    pair.b = coral::load_cloud(line.substr(comma + 1));
    pair.T_gt = coral::RigidTransform(pair.a.dim());
    Eigen::Vector3d heading = pair.b.origin() - pair.a.origin();
    heading.z() = 0.0;
    pair.heading = heading.norm() > 1e-12 ? heading.normalized()
                                          : Eigen::Vector3d::UnitX();
    pair.id = line;
    pairs.push_back(std::move(pair));
  }
  if (pairs.empty()) throw coral::DataError(path + ": empty manifest");
  return pairs;
}

int run(int argc, char** argv) {
  CLI::App app{"CorAl point-cloud alignment quality toolkit"};
  app.require_subcommand(1);

  // --- assess ---
  auto* assess = app.add_subcommand("assess", "Score one cloud pair");
  std::string a_path, b_path, metric = "coral", params_path, per_point_path,
              out_path;
  double voxel = 0.0;
  assess->add_option("--a", a_path, "First cloud (.pc)")->required();
  assess->add_option("--b", b_path, "Second cloud (.pc)")->required();
  assess->add_option("--metric", metric, "Quality metric name");
  assess->add_option("--params", params_path, "Metric parameter JSON");
  assess->add_option("--per-point", per_point_path,
                     "Write per-point entropies/qualities to this JSON file");
  assess->add_option("--voxel", voxel, "Voxel-grid downsample size, meters");
  assess->add_option("--out", out_path, "Report path (default stdout)");

  // --- radar-extract ---
  auto* radar = app.add_subcommand("radar-extract",
                                   "Polar sweep to sparse point cloud");
  std::string image_path, meta_path, cloud_out;
  coral::RadarFilterParams filter;
  std::vector<double> pose_xyt;
  radar->add_option("--image", image_path, "Polar PNG or CSV")->required();
  radar->add_option("--meta", meta_path, "JSON sidecar")->required();
  radar->add_option("--out", cloud_out, "Output cloud (.pc)")->required();
  radar->add_option("--k", filter.k, "Masked bins per azimuth");
  radar->add_option("--z-min", filter.z_min, "Noise floor");
  radar->add_option("--w", filter.w, "Window half-width, bins");
  radar->add_option("--min-range", filter.min_range, "Minimum range, meters");
  radar->add_option("--pose", pose_xyt,
                    "x y theta_rad: emit the cloud in the world frame")
      ->expected(3);

  // --- train ---
  auto* train_cmd = app.add_subcommand("train", "Train alignment classifier");
  std::string pairs_path, protocol = "lidar", model_out;
  std::uint64_t seed = 1;
  double e_d = -1.0, e_theta_deg = -1.0, t_h = 0.5;
  train_cmd->add_option("--pairs", pairs_path, "Manifest CSV: a.pc,b.pc rows")
      ->required();
  train_cmd->add_option("--protocol", protocol, "lidar or radar")
      ->check(CLI::IsMember({"lidar", "radar"}));
  train_cmd->add_option("--metric", metric, "Quality metric name");
  train_cmd->add_option("--params", params_path, "Metric parameter JSON");
  train_cmd->add_option("--seed", seed, "RNG seed");
  train_cmd->add_option("--e-d", e_d, "Induced offset, meters");
  train_cmd->add_option("--e-theta-deg", e_theta_deg, "Induced yaw, degrees");
  train_cmd->add_option("--t-h", t_h, "Classification threshold");
  train_cmd->add_option("--out", model_out, "Model JSON path")->required();

  // --- classify ---
  auto* classify = app.add_subcommand("classify", "Classify one cloud pair");
  std::string model_path;
  classify->add_option("--model", model_path, "Model JSON")->required();
  classify->add_option("--a", a_path, "First cloud (.pc)")->required();
  classify->add_option("--b", b_path, "Second cloud (.pc)")->required();
  classify->add_option("--params", params_path, "Metric parameter JSON");
  classify->add_option("--out", out_path, "Report path (default stdout)");

  // --- eval ---
  auto* eval_cmd = app.add_subcommand("eval", "Run a JSON-config experiment");
  std::string config_path, report_path;
  eval_cmd->add_option("--config", config_path, "Experiment JSON")->required();
  eval_cmd->add_option("--out", report_path, "Report JSON path")->required();

  // --- synth ---
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic scene");
  std::string spec_path, out_dir;
  synth_cmd->add_option("--spec", spec_path, "Scene spec JSON")->required();
  synth_cmd->add_option("--out", out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  if (assess->parsed()) {
    coral::PointCloud a = coral::load_cloud(a_path);
    coral::PointCloud b = coral::load_cloud(b_path);
    if (voxel > 0.0) {
      a = coral::voxel_downsample(a, voxel);
      b = coral::voxel_downsample(b, voxel);
    }
    const coral::MetricParams params = params_from_file(params_path);
    const coral::MetricKind kind = coral::metric_from_name(metric);
    const coral::QualityFeatureVector features =
        coral::compute_features(kind, a, b, params);
    json report{{"metric", metric},
                {"x1", features.x1},
                {"x2", features.x2},
                {"x3", features.x3},
                {"arity", features.arity},
                {"params",
                 {{"r_min", params.coral.r_min},
                  {"r_max", params.coral.r_max},
                  {"alpha_deg", params.coral.alpha * 180.0 / std::numbers::pi},
                  {"epsilon", params.coral.epsilon},
                  {"e_reject", params.coral.e_reject}}}};
    if (kind == coral::MetricKind::kCoral ||
        kind == coral::MetricKind::kCoralMedian) {
      const coral::QualityResult q = coral::coral_quality(a, b, params.coral);
      report["Q"] = q.Q;
      report["H_joint"] = q.H_joint;
      report["H_sep"] = q.H_sep;
      report["n_valid_joint"] = q.joint.n_valid;
      report["n_valid_separate"] = q.separate.n_valid;
      if (!per_point_path.empty()) {
        json pp{{"per_point_quality", q.per_point_quality},
                {"joint_entropy", q.joint.per_point_entropy},
                {"separate_entropy", q.separate.per_point_entropy}};
        write_text(per_point_path, pp.dump(2) + "\n");
      }
    }
    emit(report, out_path);
    return 0;
  }

  if (radar->parsed()) {
    const coral::PolarRadarImage image =
        coral::load_polar_image(image_path, meta_path);
    filter.validate();
    const coral::RipFeatureSet rip = coral::extract_rip(image, filter);
    coral::PointCloud cloud = coral::to_cartesian(rip, image.gamma,
                                                  image.n_azimuth,
                                                  filter.min_range);
    if (!pose_xyt.empty())
      cloud = coral::apply_transform(
          cloud,
          coral::RigidTransform::planar(pose_xyt[0], pose_xyt[1], pose_xyt[2]));
    coral::save_cloud(cloud, cloud_out);
    return 0;
  }

  if (train_cmd->parsed()) {
    const std::vector<coral::CloudPair> pairs =
        pairs_from_manifest_file(pairs_path);
    const coral::MetricParams params = params_from_file(params_path);
    const coral::MetricFn fn =
        coral::make_metric_fn(coral::metric_from_name(metric), params);
    const coral::Protocol proto = protocol == "radar" ? coral::Protocol::kRadar
                                                      : coral::Protocol::kLidar;
    coral::ErrorSpec error =
        proto == coral::Protocol::kRadar
            ? coral::ErrorSpec{0.3, 0.0}
            : coral::ErrorSpec{0.1, coral::kLidarYawOffset};
    if (e_d >= 0.0) error.e_d = e_d;
    if (e_theta_deg >= 0.0) error.e_theta = e_theta_deg * std::numbers::pi / 180.0;
    const coral::TrainingSet set =
        coral::generate_training_set(pairs, proto, error, fn, seed);
    for (const std::string& msg : set.skip_log)
      std::cerr << "skipped sample: " << msg << '\n';
    coral::ClassifierModel model = coral::train(set.samples);
    model.metric_name = metric;
    model.threshold = t_h;
    coral::save_model(model, model_out);
    return 0;
  }

  if (classify->parsed()) {
    const coral::ClassifierModel model = coral::load_model(model_path);
    const coral::PointCloud a = coral::load_cloud(a_path);
    const coral::PointCloud b = coral::load_cloud(b_path);
    const coral::MetricParams params = params_from_file(params_path);
    const coral::QualityFeatureVector features = coral::compute_features(
        coral::metric_from_name(model.metric_name), a, b, params);
    const coral::Prediction pred = coral::predict(model, features);
    emit(json{{"p", pred.p},
              {"y_pred", pred.aligned ? "aligned" : "misaligned"},
              {"t_h", model.threshold},
              {"metric", model.metric_name}},
         out_path);
    return 0;
  }

  if (eval_cmd->parsed()) {
    const json config = load_json(config_path);
    const json report = coral::run_experiment(config);
    write_text(report_path, report.dump(2) + "\n");

    // Companion CSVs for external plotting.
    const std::string stem =
        std::filesystem::path(report_path).replace_extension("").string();
    std::string roc_csv = "metric,e_d,spacing,fpr,tpr,threshold\n";
    std::string acc_csv = "metric,e_d,spacing,accuracy,accuracy_std,auc\n";
    for (const auto& exp : report.at("experiments")) {
      for (const auto& method : exp.at("methods")) {
        const std::string m = method.at("metric").get<std::string>();
        const std::string prefix = m + "," + exp.at("e_d").dump() + "," +
                                   exp.at("spacing").dump() + ",";
        for (const auto& p : method.at("roc"))
          roc_csv += prefix + p.at("fpr").dump() + "," + p.at("tpr").dump() +
                     "," + p.at("threshold").dump() + "\n";
        acc_csv += prefix + method.at("accuracy").dump() + "," +
                   method.at("accuracy_std").dump() + "," +
                   method.at("auc").dump() + "\n";
      }
    }
    write_text(stem + "_roc.csv", roc_csv);
    write_text(stem + "_accuracy.csv", acc_csv);
    return 0;
  }

  if (synth_cmd->parsed()) {
    const json spec_json = load_json(spec_path);
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);

    if (spec_json.contains("radar_scene")) {
      const auto& rj = spec_json.at("radar_scene");
      coral::RadarSceneSpec spec;
      spec.n_azimuth = rj.value("n_azimuth", spec.n_azimuth);
      spec.n_range = rj.value("n_range", spec.n_range);
      spec.gamma = rj.value("gamma", spec.gamma);
      spec.n_poses = rj.value("n_poses", spec.n_poses);
      spec.pose_spacing = rj.value("pose_spacing", spec.pose_spacing);
      spec.n_walls = rj.value("n_walls", spec.n_walls);
      spec.noise_max = rj.value("noise_max", spec.noise_max);
      spec.seed = rj.value("seed", spec.seed);
      const coral::RadarScene scene = coral::synth_radar_scene(spec);
      std::vector<coral::Pose> poses;
      for (std::size_t i = 0; i < scene.sweeps.size(); ++i) {
        const std::string base = (dir / scene.sweeps[i].id).string();
        coral::save_polar_png(scene.sweeps[i], base + ".png");
        coral::save_polar_meta(scene.sweeps[i], base + ".json");
        poses.push_back({scene.sweeps[i].id, scene.poses[i]});
      }
      coral::save_poses(poses, 2, (dir / "poses.csv").string());
      return 0;
    }

    coral::SyntheticSceneSpec spec;
    const json& sj =
        spec_json.contains("scene") ? spec_json.at("scene") : spec_json;
    spec.kind = coral::scene_kind_from_name(sj.value("kind", "structured-room"));
    spec.dim = sj.value("dim", 3);
    spec.extent = sj.value("extent", 20.0);
    spec.density = sj.value("density", 40.0);
    spec.noise_sigma = sj.value("noise_sigma", 0.02);
    spec.seed = sj.value("seed", 1);
    spec.n_poses = sj.value("n_poses", 10);
    spec.sensor_range = sj.value("sensor_range", 12.0);
    const coral::SyntheticScene scene = coral::synth_scene(spec);
    coral::save_cloud(scene.map, (dir / "map.pc").string());
    std::vector<coral::Pose> poses;
    for (std::size_t i = 0; i < scene.views.size(); ++i) {
      coral::save_cloud(scene.views[i],
                        (dir / (scene.views[i].id() + ".pc")).string());
      poses.push_back({scene.views[i].id(), scene.poses[i]});
    }
    coral::save_poses(poses, spec.dim, (dir / "poses.csv").string());
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const coral::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 3;
  } catch (const coral::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
