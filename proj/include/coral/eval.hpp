#pragma once
// Experiment orchestration: self-supervised dataset generation, k-fold or
// cross-environment training, accuracy/AUC/ROC reporting, error-magnitude
// and scan-spacing sweeps, and wall-clock timing.

#include <json.hpp>
#include <string>
#include <vector>

#include "coral/classifier.hpp"
#include "coral/metrics.hpp"
#include "coral/rocauc.hpp"
#include "coral/synth.hpp"

namespace coral {

struct MethodReport {
  std::string metric;
  double accuracy = 0.0;  // balanced accuracy, averaged over folds
  double accuracy_std = 0.0;
  double auc = 0.0;  // pooled test predictions
  RocCurve roc;
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;  // pooled, at t_h
  std::vector<double> fold_accuracies;
  std::size_t n_samples = 0;
  std::size_t skipped = 0;
  ClassifierModel model;  // from the last trained split
};

struct EvalOptions {
  Protocol protocol = Protocol::kLidar;
  ErrorSpec error{0.1, kLidarYawOffset};
  int kfolds = 5;
  std::uint64_t seed = 1;
  double threshold = 0.5;
};

// Contiguous-in-sequence pair folds: the samples of one pair never straddle
// folds. Class weights are refit on each training split.
MethodReport evaluate_kfold(const std::string& name, const MetricFn& metric,
                            const std::vector<CloudPair>& pairs,
                            const EvalOptions& options);

MethodReport evaluate_cross(const std::string& name, const MetricFn& metric,
                            const std::vector<CloudPair>& train_pairs,
                            const std::vector<CloudPair>& test_pairs,
                            const EvalOptions& options);

struct TimingStats {
  double mean_ms = 0.0;
  double std_ms = 0.0;
  std::size_t runs = 0;
  int threads = 1;
};

// Runs fn(i) for i cycling over item_count until at least min_runs calls.
TimingStats time_over(std::size_t item_count,
                      const std::function<void(std::size_t)>& fn,
                      std::size_t min_runs = 50);

MetricFn make_metric_fn(MetricKind kind, const MetricParams& params);

// Full JSON-config experiment (the `coral eval` entry point).
nlohmann::json run_experiment(const nlohmann::json& config);

nlohmann::json method_report_to_json(const MethodReport& report);

}  // namespace coral
