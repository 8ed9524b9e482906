#pragma once
// CorAl dual differential-entropy alignment quality.
//
// Per point, a Gaussian is fit to the closed-ball neighborhood and scored by
// its differential entropy h = 0.5*ln((2*pi*e)^N * det(Sigma)). The quality
// Q is the aggregate entropy of the joint cloud minus the aggregate entropy
// of the clouds taken separately; well-aligned pairs have Q near zero.

#include <cstddef>
#include <vector>

#include "coral/features.hpp"
#include "coral/geometry.hpp"
#include "coral/index.hpp"

namespace coral {

struct CoralParams {
  double r_min = 0.2;   // meters
  double r_max = 1.0;   // meters
  double alpha = 0.0;   // vertical sensor resolution, radians; 0 = fixed r_min
  double epsilon = 0.0; // determinant floor; entropy floor is 0.5*ln(epsilon)
  double e_reject = 0.0;  // fraction of lowest entropies dropped
  enum class Aggregate { kMean, kMedian };
  Aggregate aggregate = Aggregate::kMean;
  int min_neighbors = 0;  // 0 -> dim + 2

  void validate() const;
  int effective_min_neighbors(int dim) const {
    return min_neighbors > 0 ? min_neighbors : dim + 2;
  }
  // Largest radius effective_radius can return; sizes index cells.
  double query_radius_bound() const { return alpha == 0.0 ? r_min : r_max; }
};

struct EntropyReport {
  std::vector<double> per_point_entropy;  // nats; NaN where invalid
  std::vector<bool> valid;
  double H_agg = 0.0;      // nats/point
  std::size_t n_valid = 0; // valid entries
  std::size_t n_used = 0;  // entries surviving outlier rejection
};

struct QualityResult {
  double Q = 0.0;        // H_joint - H_sep, nats/point
  double H_joint = 0.0;
  double H_sep = 0.0;
  // Index-aligned with the joint cloud (Pa followed by Pb).
  std::vector<double> per_point_quality;  // NaN where invalid
  std::vector<bool> quality_valid;
  EntropyReport joint;
  EntropyReport separate;
};

// Entropy of one neighborhood given coordinate-major buffers (zs unused for
// dim 2). Returns NaN when the fit is invalid (too few neighbors, or
// epsilon = 0 with a non-positive covariance determinant).
double point_entropy(const double* xs, const double* ys, const double* zs,
                     std::size_t n, int dim, const CoralParams& params);

double effective_radius(const Eigen::Vector3d& p,
                        const Eigen::Vector3d& sensor_origin,
                        const CoralParams& params);

// Entropy of every point of `target` with neighborhoods drawn from `search`.
// `origins` has one entry per target point (or a single shared entry) and
// supplies the sensor position used by effective_radius.
EntropyReport cloud_entropy(const PointCloud& target,
                            const NeighborhoodIndex& search,
                            const std::vector<Eigen::Vector3d>& origins,
                            const CoralParams& params);

QualityResult coral_quality(const PointCloud& a, const PointCloud& b,
                            const CoralParams& params);

// Q_misaligned / Q_aligned (Q_s). +inf when Q_aligned <= 0 < Q_misaligned,
// NaN when both are <= 0.
double quality_separability(const QualityResult& aligned,
                            const QualityResult& misaligned);

// (x1, x2) = (H_joint, H_sep).
QualityFeatureVector coral_features(const PointCloud& a, const PointCloud& b,
                                    const CoralParams& params);

}  // namespace coral
