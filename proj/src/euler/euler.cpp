#include "elab/euler.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace elab::euler {

namespace {

Field real_dealiased(const Field& f) { return grid::dealias(f).real_part(); }

Field dx(const Field& f, int axis) { return grid::spectral_derivative(f, axis).real_part(); }

FluidState axpy(const FluidState& s, const Tendency& k, double a) {
  FluidState out = s;
  out.rho += k.drho * cplx(a);
  for (int j = 0; j < s.u.dim(); ++j) out.u[j] += k.du[j] * cplx(a);
  return out;
}

}  // namespace

Tendency euler_rhs(const FluidState& state, double b0) {
  const auto& box = state.rho.box();
  const int d = box.d;
  if (state.u.dim() != d) throw ValidationError("velocity has the wrong number of components");
  Tendency out{Field(box), VectorField(box)};
  for (int j = 0; j < d; ++j) out.drho -= dx(real_dealiased(state.rho * state.u[j]), j);
  for (int j = 0; j < d; ++j) {
    Field adv(box);
    for (int k = 0; k < d; ++k) adv += state.u[k] * dx(state.u[j], k);
    out.du[j] = (real_dealiased(adv) + dx(state.rho, j) * cplx(b0)) * cplx(-1.0);
  }
  return out;
}

double admissible_dt(const FluidState& state, double b0, double cfl) {
  double umax = 0.0;
  for (std::size_t i = 0; i < state.rho.size(); ++i) {
    double s = 0.0;
    for (int j = 0; j < state.u.dim(); ++j) s += std::norm(state.u[j][i]);
    umax = std::max(umax, std::sqrt(s));
  }
  const double c = std::sqrt(std::max(0.0, b0 * state.rho.max_real()));
  const double speed = umax + c;
  return speed > 0.0 ? cfl * state.rho.box().spacing() / speed : INFINITY;
}

FluidState euler_step(const FluidState& state, double dt, double b0) {
  const double limit = admissible_dt(state, b0);
  if (std::abs(dt) > limit)
    throw CflError("CFL violated: |dt| = " + std::to_string(std::abs(dt)) + " exceeds admissible " +
                       std::to_string(limit),
                   limit);
  const auto k1 = euler_rhs(state, b0);
  const auto k2 = euler_rhs(axpy(state, k1, dt / 2), b0);
  const auto k3 = euler_rhs(axpy(state, k2, dt / 2), b0);
  const auto k4 = euler_rhs(axpy(state, k3, dt), b0);
  FluidState out = state;
  const cplx w1(dt / 6), w2(dt / 3);
  out.rho += k1.drho * w1 + k2.drho * w2 + k3.drho * w2 + k4.drho * w1;
  for (int j = 0; j < state.u.dim(); ++j)
    out.u[j] += k1.du[j] * w1 + k2.du[j] * w2 + k3.du[j] * w2 + k4.du[j] * w1;
  out.t = state.t + dt;
  return out;
}

MonitorReading read_monitor(const FluidState& state) {
  const auto& box = state.rho.box();
  MonitorReading r;
  r.rho_min = state.rho.min_real();
  std::vector<std::vector<cplx>> spectra;
  spectra.push_back(grid::spectrum(state.rho));
  for (int j = 0; j < state.u.dim(); ++j) spectra.push_back(grid::spectrum(state.u[j]));
  const double lo = 2.0 * box.n / 9.0, hi = box.n / 3.0;
  double tail = 0.0, total = 0.0;
  for (std::size_t i = 1; i < box.size(); ++i) {
    const auto idx = box.unflatten(i);
    int mmax = 0;
    for (int a = 0; a < box.d; ++a) {
      const int m = idx[static_cast<std::size_t>(a)];
      mmax = std::max(mmax, m < box.n / 2 ? m : box.n - m);
    }
    double e = 0.0;
    for (const auto& s : spectra) e += std::norm(s[i]);
    total += e;
    if (mmax > lo && mmax <= hi) tail += e;
  }
  r.tail_fraction = total > 0.0 ? tail / total : 0.0;
  for (int j = 0; j < state.u.dim(); ++j)
    for (int k = 0; k < box.d; ++k) r.max_gradient = std::max(r.max_gradient, dx(state.u[j], k).max_abs());
  return r;
}

bool violates(const RegularityMonitor& m, const MonitorReading& r) {
  return r.tail_fraction > m.stop_threshold || r.rho_min < m.rho_floor;
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::ReachedHorizon: return "reached_horizon";
    case StopReason::SpectralTail: return "spectral_tail";
    case StopReason::NegativeDensity: return "negative_density";
  }
  return "unknown";
}

EvolveReport evolve_euler(FluidState& state, double T, double dt, double b0, const RegularityMonitor& monitor,
                          int every, const std::function<void(int, const FluidState&, const MonitorReading&)>& on_snapshot) {
  if (!(dt > 0.0)) throw ValidationError("dt must be positive", "solver.dt");
  if (every < 1) throw ValidationError("snapshot cadence must be >= 1", "solver.every");
  EvolveReport rep;
  rep.initial = read_monitor(state);
  if (violates(monitor, rep.initial)) throw Error("initial data already violates the regularity monitor");
  rep.last = rep.initial;
  const int steps = static_cast<int>(std::llround(T / dt));
  const double t0 = state.t;
  if (on_snapshot) on_snapshot(0, state, rep.initial);
  for (int s = 1; s <= steps; ++s) {
    FluidState next = euler_step(state, dt, b0);
    const auto reading = read_monitor(next);
    if (violates(monitor, reading)) {
      rep.reason = reading.rho_min < monitor.rho_floor ? StopReason::NegativeDensity : StopReason::SpectralTail;
      rep.certified_T = state.t - t0;
      return rep;
    }
    state = std::move(next);
    rep.last = reading;
    rep.steps = s;
    if (on_snapshot && (s % every == 0 || s == steps)) on_snapshot(s, state, reading);
  }
  rep.certified_T = state.t - t0;
  rep.reason = StopReason::ReachedHorizon;
  return rep;
}

double measure_acoustic_speed(double b0, double rho0, double L, int n, double eps, double T, double dt) {
  const auto box = BoxSpec::make(1, L, n);
  const double k = 2.0 * std::numbers::pi / L;
  const double c = std::sqrt(b0 * rho0);
  FluidState s{Field::from_function(box, [&](const Point& x) { return cplx(rho0 + eps * std::cos(k * x[0])); }),
               VectorField(box), 0.0};
  s.u[0] = Field::from_function(box, [&](const Point& x) { return cplx(c / rho0 * eps * std::cos(k * x[0])); });
  const double phase0 = std::arg(grid::spectrum(s.rho)[1]);
  const int steps = static_cast<int>(std::llround(T / dt));
  for (int i = 0; i < steps; ++i) s = euler_step(s, dt, b0);
  // A right-moving mode e^{ik(x - ct)} loses phase k c t; unwrap around the
  // expected value.
  const double expected = -k * c * s.t;
  double dphi = std::arg(grid::spectrum(s.rho)[1]) - phase0;
  dphi += 2.0 * std::numbers::pi * std::round((expected - dphi) / (2.0 * std::numbers::pi));
  return -dphi / (k * s.t);
}

MomentumState to_momentum(const FluidState& s) {
  MomentumState m{s.rho, VectorField(s.rho.box()), s.t};
  for (int j = 0; j < s.u.dim(); ++j) m.J[j] = s.rho * s.u[j];
  return m;
}

FluidState to_velocity(const MomentumState& m) {
  FluidState s{m.rho, VectorField(m.rho.box()), m.t};
  for (int j = 0; j < m.J.dim(); ++j)
    for (std::size_t i = 0; i < m.rho.size(); ++i) s.u[j][i] = m.J[j][i] / m.rho[i].real();
  return s;
}

namespace {

struct MomentumTendency {
  Field drho;
  VectorField dJ;
};

MomentumTendency momentum_rhs(const MomentumState& s, double b0) {
  const auto& box = s.rho.box();
  const int d = box.d;
  MomentumTendency out{Field(box), VectorField(box)};
  for (int j = 0; j < d; ++j) out.drho -= dx(s.J[j], j);
  const Field p = real_dealiased(s.rho * s.rho) * cplx(0.5 * b0);
  for (int j = 0; j < d; ++j) {
    Field acc = dx(p, j);
    for (int k = 0; k < d; ++k) {
      Field flux(box);
      for (std::size_t i = 0; i < flux.size(); ++i) flux[i] = s.J[j][i] * s.J[k][i] / s.rho[i].real();
      acc += dx(real_dealiased(flux), k);
    }
    out.dJ[j] = acc * cplx(-1.0);
  }
  return out;
}

MomentumState axpy(const MomentumState& s, const MomentumTendency& k, double a) {
  MomentumState out = s;
  out.rho += k.drho * cplx(a);
  for (int j = 0; j < s.J.dim(); ++j) out.J[j] += k.dJ[j] * cplx(a);
  return out;
}

}  // namespace

MomentumState momentum_step(const MomentumState& state, double dt, double b0) {
  const auto k1 = momentum_rhs(state, b0);
  const auto k2 = momentum_rhs(axpy(state, k1, dt / 2), b0);
  const auto k3 = momentum_rhs(axpy(state, k2, dt / 2), b0);
  const auto k4 = momentum_rhs(axpy(state, k3, dt), b0);
  MomentumState out = state;
  const cplx w1(dt / 6), w2(dt / 3);
  out.rho += k1.drho * w1 + k2.drho * w2 + k3.drho * w2 + k4.drho * w1;
  for (int j = 0; j < state.J.dim(); ++j)
    out.J[j] += k1.dJ[j] * w1 + k2.dJ[j] * w2 + k3.dJ[j] * w2 + k4.dJ[j] * w1;
  out.t = state.t + dt;
  return out;
}

}  // namespace elab::euler
