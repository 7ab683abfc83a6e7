#pragma once

#include <utility>
#include <vector>

namespace elab {

/// Least-squares line through (log x, log y).
struct RateFit {
  std::vector<std::pair<double, double>> points;  // (log x, log y)
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Fit log y = slope * log x + intercept. Needs >= 3 points, all values
/// strictly positive.
RateFit fit_rate(const std::vector<std::pair<double, double>>& xy);

}  // namespace elab
