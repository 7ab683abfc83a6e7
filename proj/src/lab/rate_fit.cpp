#include "elab/rate_fit.hpp"

#include <cmath>

#include "elab/error.hpp"

namespace elab {

RateFit fit_rate(const std::vector<std::pair<double, double>>& xy) {
  if (xy.size() < 3) throw ValidationError("rate fit needs at least 3 points");
  RateFit fit;
  for (const auto& [x, y] : xy) {
    if (!(x > 0.0) || !(y > 0.0)) throw ValidationError("rate fit needs strictly positive values");
    fit.points.emplace_back(std::log(x), std::log(y));
  }
  const double m = static_cast<double>(fit.points.size());
  double sx = 0, sy = 0;
  for (const auto& [lx, ly] : fit.points) {
    sx += lx;
    sy += ly;
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& [lx, ly] : fit.points) {
    sxx += (lx - mx) * (lx - mx);
    sxy += (lx - mx) * (ly - my);
    syy += (ly - my) * (ly - my);
  }
  if (sxx == 0.0) throw ValidationError("rate fit needs at least two distinct abscissae");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0;
  for (const auto& [lx, ly] : fit.points) {
    const double r = ly - (fit.intercept + fit.slope * lx);
    ss_res += r * r;
  }
  // A perfectly flat series (syy == 0) is an exact fit.
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

}  // namespace elab
