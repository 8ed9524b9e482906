#pragma once

#include "coral/error.hpp"

namespace coral {

// Inputs any quality metric exposes to the classifier. Absent slots are 0.
struct QualityFeatureVector {
  double x1 = 0.0;
  double x2 = 0.0;
  double x3 = 0.0;
  int arity = 1;  // 1, 2 or 3

  double at(int i) const {
    switch (i) {
      case 0: return x1;
      case 1: return x2;
      case 2: return x3;
      default: throw ConfigError("feature index out of range");
    }
  }
};

}  // namespace coral
