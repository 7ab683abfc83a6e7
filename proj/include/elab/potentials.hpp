#pragma once

#include <string>
#include <vector>

#include "elab/grid.hpp"
#include "elab/rate_fit.hpp"

namespace elab {

/// The (hbar, N, beta) triple plus dimension. N is a real-valued knob; it is
/// an integer only when used as a particle count.
struct PhysicalScales {
  double hbar = 1.0;
  double N = 2.0;
  double beta = 0.5;
  int d = 1;

  static PhysicalScales make(double hbar, double N, double beta, int d);

  /// beta < 2/5, the exponent range covered by the three-dimensional theorem.
  bool theorem_regime() const noexcept { return beta < 0.4; }
  double n_beta() const;
  /// 1 / (hbar^4 N^beta): the mean-field smallness budget.
  double mean_field_budget() const;
};

/// Threshold N >= exp(exp((C_V^2 E^2 T0 / hbar^7)^2)) evaluated in log-log
/// space. Purely diagnostic.
struct RestrictionDiagnostic {
  double lhs_log_log_N = 0.0;  // ln ln N
  double rhs_exponent = 0.0;   // (C_V^2 E^2 T0 / hbar^7)^2
  bool satisfied = false;
};
RestrictionDiagnostic restriction_diagnostic(const PhysicalScales& s, double c_v, double energy, double t0);

enum class PotentialKind { Gaussian, Samples };

/// Candidate norms for the unspecified constant C_V.
struct PotentialNorms {
  double l1 = 0.0;
  double l3_2 = 0.0;
  double linf = 0.0;
  double x2_grad = 0.0;     // int |x|^2 |grad V|
  double x_dot_grad = 0.0;  // int |x . grad V|
};

struct Potential {
  PotentialKind kind = PotentialKind::Gaussian;
  Field profile;          // samples of V on the box
  double b0 = 0.0;        // int V
  double width = 0.0;     // Gaussian width, or effective width for samples
  double amplitude = 0.0; // peak value
  PotentialNorms norms;

  /// V at an arbitrary point: analytic for Gaussians, trigonometric
  /// interpolation (zero outside the box) for sampled profiles.
  double evaluate(const Point& x) const;
};

/// V(x) = amplitude * exp(-|x|^2 / width^2), centred at the origin.
Potential gaussian_potential(const BoxSpec& box, double width, double amplitude);
/// Even, nonnegative profile given as samples. Focusing profiles (b0 <= 0)
/// are rejected: the limiting Euler system is not hyperbolic for them.
Potential sampled_potential(const Field& samples);

/// Smallest power-of-two n resolving V_N with >= 8 points across 2 * w_N.
int required_points(const Potential& v, double L, double N, double beta);

/// V_N(x) = N^{d beta} V(N^beta x).
Field scale_potential(const Potential& v, const PhysicalScales& scales);
/// Unchecked-scale variant (allows N = 1 for identity tests).
Field scale_potential(const Potential& v, double N, double beta);

/// ||V_N * f - b0 f||_{L2}.
double mollifier_defect(const Potential& v, const Field& f, double beta, double N);

struct MollifierStudy {
  std::vector<double> N;
  std::vector<double> defect;
  RateFit fit;  // slope of log defect against log N
};
MollifierStudy mollifier_defect_rate(const Potential& v, const Field& f, double beta,
                                     const std::vector<double>& N_list);

}  // namespace elab
