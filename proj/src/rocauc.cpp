#include "coral/rocauc.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "coral/error.hpp"

namespace coral {

RocCurve roc_curve(const std::vector<double>& scores,
                   const std::vector<bool>& labels) {
  if (scores.size() != labels.size()) throw DataError("score/label size mismatch");
  const auto n_pos = static_cast<double>(
      std::count(labels.begin(), labels.end(), true));
  const auto n_neg = static_cast<double>(labels.size()) - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw DataError("ROC requires both classes");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });

  RocCurve curve;
  curve.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  double tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    // All samples sharing a score flip together; ties never split a step.
    const double s = scores[order[i]];
    while (i < order.size() && scores[order[i]] == s) {
      if (labels[order[i]])
        tp += 1;
      else
        fp += 1;
      ++i;
    }
    curve.points.push_back({fp / n_neg, tp / n_pos, s});
  }

  double auc = 0.0;
  for (std::size_t k = 1; k < curve.points.size(); ++k) {
    const RocPoint& a = curve.points[k - 1];
    const RocPoint& b = curve.points[k];
    auc += (b.fpr - a.fpr) * 0.5 * (a.tpr + b.tpr);
  }
  curve.auc = auc;
  return curve;
}

}  // namespace coral
