#pragma once

#include <string_view>

namespace riskopt {

enum class CiMethod { kAsymptotic, kRsa };

std::string_view to_string(CiMethod m);

/// [low, up] on an optimal value; `level` is the nominal coverage.
struct ConfidenceInterval {
  double low = 0.0;
  double up = 0.0;
  double level = 0.0;
  CiMethod method = CiMethod::kAsymptotic;

  double width() const { return up - low; }
  bool contains(double v) const { return low <= v && v <= up; }
};

}  // namespace riskopt
