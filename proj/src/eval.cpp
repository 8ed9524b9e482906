#include "coral/eval.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "coral/io.hpp"
#include "coral/radar_io.hpp"

namespace coral {

namespace {

struct SplitEval {
  double balanced_accuracy = 0.0;
};

ClassifierModel train_split(std::vector<LabeledPair> samples, double threshold) {
  // Refit inverse-class-frequency weights on the split.
  std::size_t n_pos = 0;
  for (const LabeledPair& s : samples) n_pos += s.aligned ? 1 : 0;
  const std::size_t n_neg = samples.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw DataError("split is missing a class");
  const double total = static_cast<double>(samples.size());
  for (LabeledPair& s : samples)
    s.weight = total / (2.0 * static_cast<double>(s.aligned ? n_pos : n_neg));
  ClassifierModel model = train(samples);
  model.threshold = threshold;
  return model;
}

double balanced_accuracy(std::size_t tp, std::size_t fp, std::size_t tn,
                         std::size_t fn) {
  const std::size_t pos = tp + fn, neg = tn + fp;
  if (pos == 0 && neg == 0) throw DataError("empty evaluation split");
  if (pos == 0) return static_cast<double>(tn) / static_cast<double>(neg);
  if (neg == 0) return static_cast<double>(tp) / static_cast<double>(pos);
  return 0.5 * (static_cast<double>(tp) / static_cast<double>(pos) +
                static_cast<double>(tn) / static_cast<double>(neg));
}

// Pair index for each sample, from first-seen pair_id order.
std::vector<std::size_t> sample_pair_index(const std::vector<LabeledPair>& samples) {
  std::vector<std::size_t> index(samples.size());
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    auto [it, inserted] = seen.try_emplace(samples[i].pair_id, seen.size());
    index[i] = it->second;
  }
  return index;
}

void finalize_report(MethodReport& report, const std::vector<double>& scores,
                     const std::vector<bool>& labels) {
  report.roc = roc_curve(scores, labels);
  report.auc = report.roc.auc;
  double mean = 0.0;
  for (const double a : report.fold_accuracies) mean += a;
  mean /= static_cast<double>(report.fold_accuracies.size());
  double var = 0.0;
  for (const double a : report.fold_accuracies) var += (a - mean) * (a - mean);
  var /= static_cast<double>(report.fold_accuracies.size());
  report.accuracy = mean;
  report.accuracy_std = std::sqrt(var);
}

}  // namespace

MethodReport evaluate_kfold(const std::string& name, const MetricFn& metric,
                            const std::vector<CloudPair>& pairs,
                            const EvalOptions& options) {
  TrainingSet set = generate_training_set(pairs, options.protocol,
                                          options.error, metric, options.seed);
  const std::vector<std::size_t> pair_index = sample_pair_index(set.samples);
  std::size_t n_pairs = 0;
  for (const std::size_t p : pair_index) n_pairs = std::max(n_pairs, p + 1);
  const int k = options.kfolds;
  if (k < 2) throw ConfigError("kfolds must be >= 2");
  if (n_pairs < static_cast<std::size_t>(2 * k))
    throw DataError("insufficient pairs for " + std::to_string(k) + " folds");

  MethodReport report;
  report.metric = name;
  report.n_samples = set.samples.size();
  report.skipped = set.skipped;

  std::vector<double> scores;
  std::vector<bool> labels;
  for (int fold = 0; fold < k; ++fold) {
    const auto fold_of = [&](std::size_t pair) {
      return static_cast<int>(pair * static_cast<std::size_t>(k) / n_pairs);
    };
    std::vector<LabeledPair> train_samples, test_samples;
    for (std::size_t i = 0; i < set.samples.size(); ++i) {
      (fold_of(pair_index[i]) == fold ? test_samples : train_samples)
          .push_back(set.samples[i]);
    }
    if (test_samples.empty()) throw DataError("empty test fold");
    const ClassifierModel model = train_split(train_samples, options.threshold);

    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (const LabeledPair& s : test_samples) {
      const Prediction pred = predict(model, s.features);
      scores.push_back(pred.p);
      labels.push_back(s.aligned);
      if (s.aligned)
        pred.aligned ? ++tp : ++fn;
      else
        pred.aligned ? ++fp : ++tn;
    }
    report.tp += tp;
    report.fp += fp;
    report.tn += tn;
    report.fn += fn;
    report.fold_accuracies.push_back(balanced_accuracy(tp, fp, tn, fn));
    report.model = model;
  }
  finalize_report(report, scores, labels);
  return report;
}

MethodReport evaluate_cross(const std::string& name, const MetricFn& metric,
                            const std::vector<CloudPair>& train_pairs,
                            const std::vector<CloudPair>& test_pairs,
                            const EvalOptions& options) {
  TrainingSet train_set = generate_training_set(
      train_pairs, options.protocol, options.error, metric, options.seed);
  TrainingSet test_set = generate_training_set(
      test_pairs, options.protocol, options.error, metric, options.seed + 1);

  MethodReport report;
  report.metric = name;
  report.n_samples = train_set.samples.size() + test_set.samples.size();
  report.skipped = train_set.skipped + test_set.skipped;
  report.model = train_split(train_set.samples, options.threshold);

  std::vector<double> scores;
  std::vector<bool> labels;
  for (const LabeledPair& s : test_set.samples) {
    const Prediction pred = predict(report.model, s.features);
    scores.push_back(pred.p);
    labels.push_back(s.aligned);
    if (s.aligned)
      pred.aligned ? ++report.tp : ++report.fn;
    else
      pred.aligned ? ++report.fp : ++report.tn;
  }
  report.fold_accuracies.push_back(
      balanced_accuracy(report.tp, report.fp, report.tn, report.fn));
  finalize_report(report, scores, labels);
  return report;
}

TimingStats time_over(std::size_t item_count,
                      const std::function<void(std::size_t)>& fn,
                      std::size_t min_runs) {
  if (item_count == 0) throw DataError("nothing to time");
  std::vector<double> ms;
  while (ms.size() < min_runs) {
    for (std::size_t i = 0; i < item_count && ms.size() < min_runs; ++i) {
      const auto start = std::chrono::steady_clock::now();
      fn(i);
      const auto stop = std::chrono::steady_clock::now();
      ms.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
    }
  }
  TimingStats stats;
  stats.runs = ms.size();
  for (const double m : ms) stats.mean_ms += m;
  stats.mean_ms /= static_cast<double>(ms.size());
  double var = 0.0;
  for (const double m : ms) var += (m - stats.mean_ms) * (m - stats.mean_ms);
  stats.std_ms = std::sqrt(var / static_cast<double>(ms.size()));
  return stats;
}

MetricFn make_metric_fn(MetricKind kind, const MetricParams& params) {
  return [kind, params](const PointCloud& a, const PointCloud& b) {
    return compute_features(kind, a, b, params);
  };
}

namespace {

SyntheticSceneSpec scene_spec_from_json(const nlohmann::json& j) {
  SyntheticSceneSpec spec;
  spec.kind = scene_kind_from_name(j.value("kind", "structured-room"));
  spec.dim = j.value("dim", 3);
  spec.extent = j.value("extent", 20.0);
  spec.density = j.value("density", 40.0);
  spec.noise_sigma = j.value("noise_sigma", 0.02);
  spec.seed = j.value("seed", 1);
  spec.n_poses = j.value("n_poses", 10);
  spec.sensor_range = j.value("sensor_range", 12.0);
  return spec;
}

MetricParams metric_params_from_json(const nlohmann::json& j) {
  MetricParams params;
  params.coral.r_min = j.value("r_min", params.coral.r_min);
  params.coral.r_max = j.value("r_max", params.coral.r_max);
  params.coral.alpha = j.value("alpha_deg", 0.0) * std::numbers::pi / 180.0;
  params.coral.epsilon = j.value("epsilon", params.coral.epsilon);
  params.coral.e_reject = j.value("e_reject", params.coral.e_reject);
  params.coral.min_neighbors = j.value("min_neighbors", 0);
  if (j.value("aggregate", "mean") == std::string("median"))
    params.coral.aggregate = CoralParams::Aggregate::kMedian;
  params.ndt_voxel = j.value("ndt_voxel", 0.0);
  params.surface_cell = j.value("surface_cell", 0.0);
  params.assoc_radius = j.value("assoc_radius", 3.0);
  params.min_cell_points = j.value("min_cell_points", 0);
  return params;
}

RadarFilterParams radar_filter_from_json(const nlohmann::json& j) {
  RadarFilterParams params;
  params.k = j.value("k", 12);
  params.z_min = j.value("z_min", 70.0);
  params.w = j.value("w", 2);
  params.min_range = j.value("min_range", 2.5);
  return params;
}

PointCloud sweep_to_world_cloud(const PolarRadarImage& sweep,
                                const RadarFilterParams& filter,
                                const RigidTransform& pose) {
  const RipFeatureSet rip = extract_rip(sweep, filter);
  const PointCloud sensor_cloud =
      to_cartesian(rip, sweep.gamma, sweep.n_azimuth, filter.min_range);
  PointCloud world = apply_transform(sensor_cloud, pose);
  world.set_id(sweep.id);
  return world;
}

std::vector<CloudPair> pairs_from_views(const std::vector<PointCloud>& views,
                                        const std::vector<RigidTransform>& poses,
                                        double spacing) {
  SyntheticScene tmp;
  tmp.views = views;
  tmp.poses = poses;
  return make_pairs(tmp, spacing);
}

std::vector<CloudPair> pairs_from_manifest(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open " + path);
  std::vector<CloudPair> pairs;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ','))
      throw DataError(path + ": manifest rows need two cloud paths");
    CloudPair pair;
    pair.a = load_cloud(a);
    pair.b = load_cloud(b);
    pair.T_gt = RigidTransform(pair.a.dim());
    Eigen::Vector3d heading = pair.b.origin() - pair.a.origin();
    heading.z() = 0.0;
    pair.heading = heading.norm() > 1e-12 ? heading.normalized()
                                          : Eigen::Vector3d::UnitX();
    pair.id = a + "/" + b;
    pairs.push_back(std::move(pair));
  }
  if (pairs.empty()) throw DataError(path + ": empty manifest");
  return pairs;
}

std::vector<CloudPair> pairs_from_config(const nlohmann::json& config,
                                         const nlohmann::json& scene_json,
                                         double spacing) {
  if (config.contains("dataset"))
    return pairs_from_manifest(
        config.at("dataset").at("pairs_manifest").get<std::string>());

  if (config.contains("radar_dataset")) {
    const auto& ds = config.at("radar_dataset");
    const RadarFilterParams filter =
        radar_filter_from_json(ds.value("filter", nlohmann::json::object()));
    const std::vector<Pose> poses =
        load_poses(ds.at("poses").get<std::string>());
    std::vector<PointCloud> views;
    std::vector<RigidTransform> transforms;
    std::size_t i = 0;
    for (const auto& sweep_json : ds.at("sweeps")) {
      if (i >= poses.size()) throw DataError("more sweeps than poses");
      const PolarRadarImage sweep =
          load_polar_image(sweep_json.at("image").get<std::string>(),
                           sweep_json.at("meta").get<std::string>());
      views.push_back(sweep_to_world_cloud(sweep, filter, poses[i].transform));
      transforms.push_back(poses[i].transform);
      ++i;
    }
    return pairs_from_views(views, transforms, spacing);
  }

  if (config.value("protocol", "lidar") == std::string("radar") &&
      config.contains("radar_scene")) {
    const auto& rj = config.at("radar_scene");
    RadarSceneSpec spec;
    spec.n_azimuth = rj.value("n_azimuth", spec.n_azimuth);
    spec.n_range = rj.value("n_range", spec.n_range);
    spec.gamma = rj.value("gamma", spec.gamma);
    spec.n_poses = rj.value("n_poses", spec.n_poses);
    spec.pose_spacing = rj.value("pose_spacing", spec.pose_spacing);
    spec.n_walls = rj.value("n_walls", spec.n_walls);
    spec.noise_max = rj.value("noise_max", spec.noise_max);
    spec.seed = rj.value("seed", spec.seed);
    const RadarFilterParams filter = radar_filter_from_json(
        config.value("filter", nlohmann::json::object()));
    const RadarScene scene = synth_radar_scene(spec);
    std::vector<PointCloud> views;
    for (std::size_t i = 0; i < scene.sweeps.size(); ++i)
      views.push_back(
          sweep_to_world_cloud(scene.sweeps[i], filter, scene.poses[i]));
    return pairs_from_views(views, scene.poses, spacing);
  }

  if (scene_json.is_null()) throw ConfigError("no scene or dataset configured");
  const SyntheticScene scene = synth_scene(scene_spec_from_json(scene_json));
  return make_pairs(scene, spacing);
}

const char* error_tier(double e_d) {
  if (e_d == 0.3) return "small";
  if (e_d == 0.5) return "medium";
  if (e_d == 0.7) return "large";
  return "";
}

}  // namespace

nlohmann::json method_report_to_json(const MethodReport& report) {
  nlohmann::json roc = nlohmann::json::array();
  for (const RocPoint& p : report.roc.points)
    roc.push_back({{"fpr", p.fpr}, {"tpr", p.tpr}, {"threshold", p.threshold}});
  return {
      {"metric", report.metric},
      {"accuracy", report.accuracy},
      {"accuracy_std", report.accuracy_std},
      {"auc", report.auc},
      {"confusion",
       {{"tp", report.tp}, {"fp", report.fp}, {"tn", report.tn}, {"fn", report.fn}}},
      {"fold_accuracies", report.fold_accuracies},
      {"n_samples", report.n_samples},
      {"skipped", report.skipped},
      {"roc", roc},
      {"model", nlohmann::json::parse(model_to_json(report.model))},
  };
}

nlohmann::json run_experiment(const nlohmann::json& config) {
  EvalOptions options;
  options.seed = config.value("seed", 1);
  options.kfolds = config.value("kfolds", 5);
  options.threshold = config.value("t_h", 0.5);
  const std::string protocol = config.value("protocol", "lidar");
  if (protocol == "lidar") {
    options.protocol = Protocol::kLidar;
    options.error = {0.1, kLidarYawOffset};
  } else if (protocol == "radar") {
    options.protocol = Protocol::kRadar;
    options.error = {0.3, 0.0};
  } else {
    throw ConfigError("protocol must be lidar or radar");
  }
  if (config.contains("error")) {
    options.error.e_d = config.at("error").value("e_d", options.error.e_d);
    options.error.e_theta =
        config.at("error").value("e_theta_deg",
                                 options.error.e_theta * 180.0 / std::numbers::pi) *
        std::numbers::pi / 180.0;
  }

  const MetricParams params = metric_params_from_json(
      config.value("params", nlohmann::json::object()));
  std::vector<std::string> metric_names;
  for (const auto& m : config.value("metrics", nlohmann::json::array({"coral"})))
    metric_names.push_back(m.get<std::string>());

  std::vector<double> e_d_list{options.error.e_d};
  if (config.contains("e_d_list"))
    e_d_list = config.at("e_d_list").get<std::vector<double>>();
  std::vector<double> spacing_list{config.value("spacing", 0.0)};
  if (config.contains("spacing_list"))
    spacing_list = config.at("spacing_list").get<std::vector<double>>();

  const std::string mode = config.value("mode", "kfold");
  const nlohmann::json scene_json = config.value("scene", nlohmann::json());
  const nlohmann::json test_scene_json =
      config.value("test_scene", nlohmann::json());

  nlohmann::json experiments = nlohmann::json::array();
  for (const double spacing : spacing_list) {
    const std::vector<CloudPair> pairs =
        pairs_from_config(config, scene_json, spacing);
    std::vector<CloudPair> test_pairs;
    if (mode == "cross") {
      if (test_scene_json.is_null())
        throw ConfigError("cross mode needs test_scene");
      const SyntheticScene test_scene =
          synth_scene(scene_spec_from_json(test_scene_json));
      test_pairs = make_pairs(test_scene, spacing);
    }

    for (const double e_d : e_d_list) {
      EvalOptions run_options = options;
      run_options.error.e_d = e_d;
      nlohmann::json methods = nlohmann::json::array();
      for (const std::string& name : metric_names) {
        const MetricFn fn = make_metric_fn(metric_from_name(name), params);
        const MethodReport report =
            mode == "cross"
                ? evaluate_cross(name, fn, pairs, test_pairs, run_options)
                : evaluate_kfold(name, fn, pairs, run_options);
        methods.push_back(method_report_to_json(report));
      }
      experiments.push_back({{"e_d", e_d},
                             {"spacing", spacing},
                             {"error_tier", error_tier(e_d)},
                             {"methods", methods}});
    }
  }
  return {{"config", config}, {"experiments", experiments}};
}

}  // namespace coral
