#include "coral/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include <json.hpp>

namespace coral {

namespace {

double softplus(double t) {
  return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t)));
}

double raw_z(const std::vector<double>& betas,
             const std::vector<double>& means,
             const std::vector<double>& scales,
             const QualityFeatureVector& f) {
  double z = betas[0];
  for (std::size_t j = 0; j + 1 < betas.size(); ++j)
    z += betas[j + 1] * (f.at(static_cast<int>(j)) - means[j]) / scales[j];
  return z;
}

}  // namespace

ClassifierModel train(const std::vector<LabeledPair>& data,
                      const TrainOptions& options) {
  if (data.empty()) throw DataError("empty training set");
  const int arity = data.front().features.arity;
  std::size_t n_pos = 0;
  for (const LabeledPair& s : data) {
    if (s.features.arity != arity)
      throw DataError("feature arity not uniform across the dataset");
    if (!(s.weight > 0)) throw DataError("weights must be positive");
    n_pos += s.aligned ? 1 : 0;
  }
  if (n_pos == 0 || n_pos == data.size())
    throw DataError("training requires both classes");

  ClassifierModel model;
  model.arity = arity;
  model.norm_means.assign(arity, 0.0);
  model.norm_scales.assign(arity, 1.0);
  for (int j = 0; j < arity; ++j) {
    double mean = 0.0;
    for (const LabeledPair& s : data) mean += s.features.at(j);
    mean /= static_cast<double>(data.size());
    double var = 0.0;
    for (const LabeledPair& s : data) {
      const double d = s.features.at(j) - mean;
      var += d * d;
    }
    var /= static_cast<double>(data.size());
    model.norm_means[j] = mean;
    model.norm_scales[j] = var > 0.0 ? std::sqrt(var) : 1.0;
  }

  double weight_sum = 0.0;
  for (const LabeledPair& s : data) weight_sum += s.weight;

  std::vector<double> betas(arity + 1, 0.0);
  std::vector<double> grad(arity + 1, 0.0);

  const auto loss_at = [&](const std::vector<double>& b) {
    double loss = 0.0;
    for (const LabeledPair& s : data) {
      const double z = raw_z(b, model.norm_means, model.norm_scales, s.features);
      loss += s.weight * (s.aligned ? softplus(-z) : softplus(z));
    }
    loss /= weight_sum;
    for (std::size_t j = 1; j < b.size(); ++j) loss += options.l2 * b[j] * b[j];
    return loss;
  };

  double lr = options.lr;
  double loss = loss_at(betas);
  int iter = 0;
  bool converged = false;
  for (; iter < options.max_iters; ++iter) {
    std::fill(grad.begin(), grad.end(), 0.0);
    for (const LabeledPair& s : data) {
      const double z =
          raw_z(betas, model.norm_means, model.norm_scales, s.features);
      const double p = 1.0 / (1.0 + std::exp(-z));
      const double err = s.weight * (p - (s.aligned ? 1.0 : 0.0));
      grad[0] += err;
      for (int j = 0; j < arity; ++j)
        grad[j + 1] += err * (s.features.at(j) - model.norm_means[j]) /
                       model.norm_scales[j];
    }
    for (double& g : grad) g /= weight_sum;
    for (int j = 0; j < arity; ++j) grad[j + 1] += 2.0 * options.l2 * betas[j + 1];

    double gmax = 0.0;
    for (const double g : grad) gmax = std::max(gmax, std::abs(g));
    if (gmax < options.tol) {
      converged = true;
      break;
    }

    // Accepted iterations never increase the loss; halve lr otherwise.
    std::vector<double> trial = betas;
    for (std::size_t j = 0; j < trial.size(); ++j) trial[j] -= lr * grad[j];
    const double trial_loss = loss_at(trial);
    if (!std::isfinite(trial_loss)) throw DataError("non-finite training loss");
    if (trial_loss > loss) {
      lr *= 0.5;
      continue;
    }
    betas = std::move(trial);
    loss = trial_loss;
  }

  model.betas = std::move(betas);
  model.train_meta = {iter, loss, data.size(), converged};
  return model;
}

Prediction predict(const ClassifierModel& model,
                   const QualityFeatureVector& features) {
  if (features.arity != model.arity) throw DataError("feature arity mismatch");
  const double z =
      raw_z(model.betas, model.norm_means, model.norm_scales, features);
  const double p = 1.0 / (1.0 + std::exp(-z));
  return {p, p >= model.threshold};
}

double nll(const ClassifierModel& model, const std::vector<LabeledPair>& data,
           double l2) {
  double weight_sum = 0.0;
  double loss = 0.0;
  for (const LabeledPair& s : data) {
    const double z =
        raw_z(model.betas, model.norm_means, model.norm_scales, s.features);
    loss += s.weight * (s.aligned ? softplus(-z) : softplus(z));
    weight_sum += s.weight;
  }
  loss /= weight_sum;
  for (std::size_t j = 1; j < model.betas.size(); ++j)
    loss += l2 * model.betas[j] * model.betas[j];
  return loss;
}

std::vector<double> nll_gradient(const ClassifierModel& model,
                                 const std::vector<LabeledPair>& data,
                                 double l2) {
  std::vector<double> grad(model.betas.size(), 0.0);
  double weight_sum = 0.0;
  for (const LabeledPair& s : data) {
    const double z =
        raw_z(model.betas, model.norm_means, model.norm_scales, s.features);
    const double p = 1.0 / (1.0 + std::exp(-z));
    const double err = s.weight * (p - (s.aligned ? 1.0 : 0.0));
    grad[0] += err;
    for (int j = 0; j < model.arity; ++j)
      grad[j + 1] += err * (s.features.at(j) - model.norm_means[j]) /
                     model.norm_scales[j];
    weight_sum += s.weight;
  }
  for (double& g : grad) g /= weight_sum;
  for (std::size_t j = 1; j < grad.size(); ++j)
    grad[j] += 2.0 * l2 * model.betas[j];
  return grad;
}

std::string model_to_json(const ClassifierModel& model) {
  nlohmann::json j{
      {"metric_name", model.metric_name},
      {"arity", model.arity},
      {"betas", model.betas},
      {"t_h", model.threshold},
      {"norm_means", model.norm_means},
      {"norm_scales", model.norm_scales},
      {"train_meta",
       {{"iterations", model.train_meta.iterations},
        {"final_loss", model.train_meta.final_loss},
        {"n_samples", model.train_meta.n_samples},
        {"converged", model.train_meta.converged}}}};
  return j.dump(2);
}

ClassifierModel model_from_json(const std::string& json_text) {
  try {
    const nlohmann::json j = nlohmann::json::parse(json_text);
    ClassifierModel model;
    model.metric_name = j.at("metric_name").get<std::string>();
    model.arity = j.at("arity").get<int>();
    model.betas = j.at("betas").get<std::vector<double>>();
    model.threshold = j.at("t_h").get<double>();
    model.norm_means = j.at("norm_means").get<std::vector<double>>();
    model.norm_scales = j.at("norm_scales").get<std::vector<double>>();
    const auto& meta = j.at("train_meta");
    model.train_meta = {meta.at("iterations").get<int>(),
                        meta.at("final_loss").get<double>(),
                        meta.at("n_samples").get<std::size_t>(),
                        meta.at("converged").get<bool>()};
    if (model.betas.size() != static_cast<std::size_t>(model.arity) + 1)
      throw DataError("betas length does not match arity");
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed model JSON: ") + e.what());
  }
}

void save_model(const ClassifierModel& model, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot write " + path);
  f << model_to_json(model) << '\n';
}

ClassifierModel load_model(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  return model_from_json(text);
}

TrainingSet generate_training_set(const std::vector<CloudPair>& pairs,
                                  Protocol protocol, const ErrorSpec& spec,
                                  const MetricFn& metric, std::uint64_t seed) {
  if (pairs.empty()) throw DataError("no input pairs");
  if (spec.e_d == 0.0) throw ConfigError("zero-error misalignment");

  std::mt19937_64 rng(seed);
  // Engine output mapped to [0,1) directly; keeps datasets byte-identical
  // across standard library implementations.
  const auto uniform01 = [&rng] {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };

  TrainingSet out;
  for (const CloudPair& pair : pairs) {
    const PointCloud b_aligned = apply_transform(pair.b, pair.T_gt);

    const auto emit = [&](const PointCloud& b, bool aligned, double offset) {
      try {
        LabeledPair sample;
        sample.features = metric(pair.a, b);
        sample.aligned = aligned;
        sample.pair_id = pair.id;
        sample.induced_offset = offset;
        out.samples.push_back(std::move(sample));
      } catch (const std::exception& e) {
        ++out.skipped;
        out.skip_log.push_back(pair.id + (aligned ? " (aligned): " : " (misaligned): ") +
                               e.what());
      }
    };

    emit(b_aligned, true, 0.0);

    if (protocol == Protocol::kLidar) {
      const double phi = 2.0 * std::numbers::pi * uniform01();
      const Eigen::Vector3d dir(std::cos(phi), std::sin(phi), 0.0);
      emit(induce_offset(b_aligned, spec.e_d, dir, spec.e_theta), false,
           spec.e_d);
    } else {
      Eigen::Vector3d h = pair.heading;
      h.z() = 0.0;
      if (h.norm() < 1e-12) h = Eigen::Vector3d::UnitX();
      h.normalize();
      const Eigen::Vector3d lateral(-h.y(), h.x(), 0.0);
      for (const Eigen::Vector3d& dir : {h, Eigen::Vector3d(-h), lateral,
                                         Eigen::Vector3d(-lateral)})
        emit(induce_offset(b_aligned, spec.e_d, dir, 0.0), false, spec.e_d);
    }
  }

  std::size_t n_pos = 0;
  for (const LabeledPair& s : out.samples) n_pos += s.aligned ? 1 : 0;
  const std::size_t n_neg = out.samples.size() - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw DataError("training set is missing a class");
  const double total = static_cast<double>(out.samples.size());
  for (LabeledPair& s : out.samples)
    s.weight = total / (2.0 * static_cast<double>(s.aligned ? n_pos : n_neg));
  return out;
}

}  // namespace coral
