#include <algorithm>
#include <cmath>

#include "elab/modulated.hpp"

namespace elab::modulated {

namespace {

bool certificate_holds(const std::vector<double>& t, const std::vector<double>& M, double hbar, double a, double C) {
  const double base = M[0] + C * a;
  if (!(base > 0.0)) return false;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double shifted = M[i] + C * a;
    if (shifted < 0.0) return false;
    const double tt = t[i] - t[0];
    const double num = shifted + C * hbar * hbar * tt;
    if (!(num > 0.0)) return false;
    if (std::log(num / base) > C * tt + 1e-12 * std::max(1.0, C * tt)) return false;
  }
  return true;
}

}  // namespace

GronwallReport gronwall_certificate(const std::vector<double>& t, const std::vector<double>& M, double hbar,
                                    double N, double beta) {
  if (t.empty() || t.size() != M.size()) throw ValidationError("Gronwall certificate needs a non-empty M(t) series");
  GronwallReport r;
  r.budget = 1.0 / (std::pow(hbar, 4) * std::pow(N, beta));
  const double a = r.budget;
  if (certificate_holds(t, M, hbar, a, 0.0)) {
    r.cstar = 0.0;
  } else {
    double lo = 0.0, hi = 1e-6;
    while (!certificate_holds(t, M, hbar, a, hi)) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e12) throw Error("Gronwall certificate: no admissible constant below 1e12");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-10 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (certificate_holds(t, M, hbar, a, mid) ? hi : lo) = mid;
    }
    r.cstar = hi;
  }
  r.certified = certificate_holds(t, M, hbar, a, r.cstar);
  r.lower_bound_holds = std::all_of(M.begin(), M.end(), [&](double m) { return m + r.cstar * a >= 0.0; });
  return r;
}

bool cstar_stable(const std::vector<double>& cstars, double factor) {
  double lo = INFINITY, hi = 0.0;
  for (double c : cstars)
    if (c > 0.0) {
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
  return hi == 0.0 || hi <= factor * lo;
}

}  // namespace elab::modulated
