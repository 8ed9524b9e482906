#pragma once
// Self-supervised alignment classification: logistic regression over quality
// feature vectors, with labeled pairs generated by inducing known sensor
// offsets on ground-truth-aligned cloud pairs.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "coral/features.hpp"
#include "coral/geometry.hpp"

namespace coral {

struct LabeledPair {
  QualityFeatureVector features;
  bool aligned = false;
  double weight = 1.0;
  std::string pair_id;
  double induced_offset = 0.0;  // meters
};

struct TrainMeta {
  int iterations = 0;
  double final_loss = 0.0;
  std::size_t n_samples = 0;
  bool converged = false;
};

struct ClassifierModel {
  std::string metric_name;
  int arity = 2;
  std::vector<double> betas;  // intercept followed by one weight per feature
  double threshold = 0.5;     // t_h
  std::vector<double> norm_means;   // per-feature z-score parameters
  std::vector<double> norm_scales;
  TrainMeta train_meta;
};

struct TrainOptions {
  double lr = 0.5;
  int max_iters = 20000;
  double tol = 1e-8;  // gradient infinity-norm
  double l2 = 0.0;    // optional ridge term for separable pathologies
};

ClassifierModel train(const std::vector<LabeledPair>& data,
                      const TrainOptions& options = {});

struct Prediction {
  double p = 0.0;
  bool aligned = false;
};

Prediction predict(const ClassifierModel& model,
                   const QualityFeatureVector& features);

// Weighted negative log-likelihood at the model's parameters; exposed for
// equivalence checks between weighted and duplicated-sample training.
double nll(const ClassifierModel& model, const std::vector<LabeledPair>& data,
           double l2 = 0.0);

// Gradient of nll with respect to the betas; exposed for finite-difference
// verification.
std::vector<double> nll_gradient(const ClassifierModel& model,
                                 const std::vector<LabeledPair>& data,
                                 double l2 = 0.0);

std::string model_to_json(const ClassifierModel& model);
ClassifierModel model_from_json(const std::string& json_text);
void save_model(const ClassifierModel& model, const std::string& path);
ClassifierModel load_model(const std::string& path);

// --- training-set generation ------------------------------------------------

enum class Protocol { kLidar, kRadar };

struct ErrorSpec {
  double e_d = 0.1;      // meters
  double e_theta = 0.0;  // radians; lidar default is 0.57 degrees
};

// 0.57 degrees, the lidar-protocol yaw offset.
inline constexpr double kLidarYawOffset = 0.57 * 3.14159265358979323846 / 180.0;

struct CloudPair {
  PointCloud a;
  PointCloud b;  // in its own frame; T_gt maps it into a's frame
  RigidTransform T_gt;
  Eigen::Vector3d heading = Eigen::Vector3d::UnitX();  // radar protocol axis
  std::string id;
};

using MetricFn = std::function<QualityFeatureVector(const PointCloud&,
                                                    const PointCloud&)>;

struct TrainingSet {
  std::vector<LabeledPair> samples;
  std::size_t skipped = 0;  // samples dropped due to metric errors
  std::vector<std::string> skip_log;
};

// One aligned sample per pair plus protocol-specific misaligned samples:
// lidar = one offset in a seeded random planar direction, radar = four
// symmetric offsets along/across the heading. Weights are set inversely
// proportional to class frequency.
TrainingSet generate_training_set(const std::vector<CloudPair>& pairs,
                                  Protocol protocol, const ErrorSpec& spec,
                                  const MetricFn& metric, std::uint64_t seed);

}  // namespace coral
