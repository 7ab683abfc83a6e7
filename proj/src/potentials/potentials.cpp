#include "elab/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace elab {

PhysicalScales PhysicalScales::make(double hbar, double N, double beta, int d) {
  if (!(hbar > 0.0)) throw ValidationError("hbar must be positive", "scales.hbar");
  if (!(N >= 2.0)) throw ValidationError("N must be >= 2", "scales.N");
  if (!(beta > 0.0 && beta < 1.0)) throw ValidationError("beta must lie in (0, 1)", "scales.beta");
  if (d < 1 || d > 3) throw ValidationError("dimension must be 1, 2 or 3", "scales.d");
  return PhysicalScales{hbar, N, beta, d};
}

double PhysicalScales::n_beta() const { return std::pow(N, beta); }

double PhysicalScales::mean_field_budget() const { return 1.0 / (std::pow(hbar, 4) * n_beta()); }

RestrictionDiagnostic restriction_diagnostic(const PhysicalScales& s, double c_v, double energy, double t0) {
  RestrictionDiagnostic r;
  r.lhs_log_log_N = s.N > std::numbers::e ? std::log(std::log(s.N)) : -INFINITY;
  const double inner = c_v * c_v * energy * energy * t0 / std::pow(s.hbar, 7);
  r.rhs_exponent = inner * inner;
  r.satisfied = r.lhs_log_log_N >= r.rhs_exponent;
  return r;
}

namespace {

PotentialNorms compute_norms(const Field& v) {
  PotentialNorms out;
  out.l1 = grid::lp_norm(v, 1.0);
  out.l3_2 = grid::lp_norm(v, 1.5);
  out.linf = grid::linf_norm(v);
  const auto g = grid::gradient(v);
  const auto& box = v.box();
  double s2 = 0.0, sd = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto x = box.point(i);
    double r2 = 0.0, gnorm2 = 0.0, xdot = 0.0;
    for (int a = 0; a < box.d; ++a) {
      const double ga = g[a][i].real();
      r2 += x[a] * x[a];
      gnorm2 += ga * ga;
      xdot += x[a] * ga;
    }
    s2 += r2 * std::sqrt(gnorm2);
    sd += std::abs(xdot);
  }
  out.x2_grad = s2 * box.cell_volume();
  out.x_dot_grad = sd * box.cell_volume();
  return out;
}

// Trigonometric interpolant of a real grid function at an arbitrary point.
double interpolate(const BoxSpec& box, const std::vector<cplx>& fh, const Point& x) {
  for (int a = 0; a < box.d; ++a)
    if (std::abs(x[a]) > box.L / 2) return 0.0;
  cplx s = 0.0;
  for (std::size_t i = 0; i < fh.size(); ++i) {
    const auto idx = box.unflatten(i);
    double phase = 0.0;
    for (int a = 0; a < box.d; ++a) {
      const int m = idx[static_cast<std::size_t>(a)];
      if (m == box.n / 2) continue;
      phase += box.wavenumber(m) * (x[a] + box.L / 2);
    }
    s += fh[i] * std::polar(1.0, phase);
  }
  return s.real() / static_cast<double>(fh.size());
}

}  // namespace

double Potential::evaluate(const Point& x) const {
  if (kind == PotentialKind::Gaussian) {
    double r2 = 0.0;
    for (int a = 0; a < profile.box().d; ++a) r2 += x[a] * x[a];
    return amplitude * std::exp(-r2 / (width * width));
  }
  return interpolate(profile.box(), grid::spectrum(profile), x);
}

Potential gaussian_potential(const BoxSpec& box, double width, double amplitude) {
  if (!(width > 0.0)) throw ValidationError("width must be positive", "potential.width");
  if (!(amplitude > 0.0)) throw ValidationError("amplitude must be positive", "potential.amplitude");
  const double edge = box.L / 2;
  if (std::exp(-edge * edge / (width * width)) > 1e-12)
    throw ValidationError("Gaussian width " + std::to_string(width) +
                              " does not decay below 1e-12 at the box boundary",
                          "potential.width");
  Potential v;
  v.kind = PotentialKind::Gaussian;
  v.width = width;
  v.amplitude = amplitude;
  v.profile = Field::from_function(box, [&](const Point& x) {
    double r2 = 0.0;
    for (int a = 0; a < box.d; ++a) r2 += x[a] * x[a];
    return cplx(amplitude * std::exp(-r2 / (width * width)), 0.0);
  });
  v.b0 = grid::integrate_re(v.profile);
  v.norms = compute_norms(v.profile);
  return v;
}

Potential sampled_potential(const Field& samples) {
  const auto& box = samples.box();
  Potential v;
  v.kind = PotentialKind::Samples;
  v.profile = samples.real_part();
  const double peak = v.profile.max_abs();
  for (std::size_t i = 0; i < v.profile.size(); ++i) {
    if (v.profile[i].real() < 0.0) throw ValidationError("potential samples must be nonnegative", "potential.samples");
    if (std::abs(v.profile[i] - v.profile[box.reflect(i)]) > 1e-12 * std::max(1.0, peak))
      throw ValidationError("potential samples must be even about the box centre", "potential.samples");
  }
  v.b0 = grid::integrate_re(v.profile);
  if (!(v.b0 > 0.0))
    throw ValidationError("b0 = int V must be positive (focusing potentials make Euler non-hyperbolic)",
                          "potential.samples");
  v.amplitude = v.profile.max_real();
  double m2 = 0.0;
  for (std::size_t i = 0; i < v.profile.size(); ++i) {
    const auto x = box.point(i);
    double r2 = 0.0;
    for (int a = 0; a < box.d; ++a) r2 += x[a] * x[a];
    m2 += r2 * v.profile[i].real();
  }
  m2 *= box.cell_volume();
  v.width = std::sqrt(2.0 * m2 / (box.d * v.b0));
  v.norms = compute_norms(v.profile);
  return v;
}

int required_points(const Potential& v, double L, double N, double beta) {
  const double scaled = v.width / std::pow(N, beta);
  const double needed = 4.0 * L / scaled;  // 2 * scaled / h >= 8
  int n = 8;
  while (n < needed) n *= 2;
  return n;
}

Field scale_potential(const Potential& v, double N, double beta) {
  if (!(N > 0.0)) throw ValidationError("N must be positive");
  const auto& box = v.profile.box();
  const int need = required_points(v, box.L, N, beta);
  if (box.n < need)
    throw ResolutionError("V_N is under-resolved: scaled width " + std::to_string(v.width / std::pow(N, beta)) +
                              " needs n >= " + std::to_string(need) + " (have " + std::to_string(box.n) + ")",
                          need);
  const double nb = std::pow(N, beta);
  const double pref = std::pow(nb, box.d);
  if (v.kind == PotentialKind::Gaussian) {
    return Field::from_function(box, [&](const Point& x) {
      Point y{nb * x[0], nb * x[1], nb * x[2]};
      return cplx(pref * v.evaluate(y), 0.0);
    });
  }
  // Sampled profile: evaluate the interpolant once per output point.
  const auto fh = grid::spectrum(v.profile);
  Field out(box);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto x = box.point(i);
    Point y{nb * x[0], nb * x[1], nb * x[2]};
    out[i] = pref * interpolate(box, fh, y);
  }
  return out;
}

Field scale_potential(const Potential& v, const PhysicalScales& scales) {
  if (scales.d != v.profile.box().d) throw ValidationError("scales.d does not match the potential box");
  return scale_potential(v, scales.N, scales.beta);
}

double mollifier_defect(const Potential& v, const Field& f, double beta, double N) {
  const auto vn = scale_potential(v, N, beta);
  auto diff = grid::periodic_convolution(vn, f);
  diff -= f * cplx(v.b0);
  return grid::l2_norm(diff);
}

MollifierStudy mollifier_defect_rate(const Potential& v, const Field& f, double beta,
                                     const std::vector<double>& N_list) {
  if (N_list.size() < 3) throw ValidationError("need at least three N values", "N_list");
  if (!std::is_sorted(N_list.begin(), N_list.end()))
    throw ValidationError("N values must be ascending", "N_list");
  MollifierStudy study;
  std::vector<std::pair<double, double>> pts;
  for (double N : N_list) {
    const double e = mollifier_defect(v, f, beta, N);
    study.N.push_back(N);
    study.defect.push_back(e);
    pts.emplace_back(N, e);
  }
  study.fit = fit_rate(pts);
  return study;
}

}  // namespace elab
