#pragma once
// ROC curve and trapezoid AUC over classifier scores. Higher scores mean
// "more aligned"; aligned is the positive class.

#include <vector>

namespace coral {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;  // from (0,0) to (1,1)
  double auc = 0.0;
};

RocCurve roc_curve(const std::vector<double>& scores,
                   const std::vector<bool>& labels);

}  // namespace coral
