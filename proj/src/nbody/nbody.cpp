#include "elab/nbody.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "elab/fft.hpp"

namespace elab::nbody {

namespace {

using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::size_t ipow(std::size_t b, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

// Coordinate index of particle p (0-based, particle 0 slowest) in a flat index.
inline std::size_t coord(std::size_t flat, int p, int N, std::size_t n) {
  for (int q = N - 1; q > p; --q) flat /= n;
  return flat % n;
}

inline double pair_value(const Field& v_n, std::size_t a, std::size_t b) {
  const std::size_t n = static_cast<std::size_t>(v_n.box().n);
  return v_n[(a + n - b + n / 2) % n].real();
}

// (1/N) sum_{i<j} V_N(x_i - x_j) at every configuration.
std::vector<double> pair_potential(const BoxSpec& box, int N, const Field& v_n) {
  const std::size_t n = static_cast<std::size_t>(box.n), total = ipow(n, N);
  std::vector<double> u(total, 0.0);
  for (std::size_t f = 0; f < total; ++f) {
    double s = 0.0;
    for (int i = 0; i < N; ++i)
      for (int j = i + 1; j < N; ++j) s += pair_value(v_n, coord(f, i, N, n), coord(f, j, N, n));
    u[f] = s / N;
  }
  return u;
}

// Sum over all N coordinates of xi^2 at every frequency index.
std::vector<double> total_xi2(const BoxSpec& box, int N) {
  const std::size_t n = static_cast<std::size_t>(box.n), total = ipow(n, N);
  std::vector<double> k2(total, 0.0);
  for (std::size_t f = 0; f < total; ++f)
    for (int p = 0; p < N; ++p) {
      const double k = box.wavenumber(static_cast<int>(coord(f, p, N, n)));
      k2[f] += k * k;
    }
  return k2;
}

// M(a, b)(x; x') = sum_rest a(x, rest) conj(b(x', rest)) h^{N-k}
DensityKernel cross_marginal(const BoxSpec& box, int N, int k, const std::vector<cplx>& a,
                             const std::vector<cplx>& b) {
  const auto n = static_cast<std::size_t>(box.n);
  const auto rows = static_cast<Eigen::Index>(ipow(n, k));
  const auto rest = static_cast<Eigen::Index>(ipow(n, N - k));
  Eigen::Map<const RowMat> A(a.data(), rows, rest), B(b.data(), rows, rest);
  DensityKernel g(box, k);
  Eigen::Map<RowMat> G(g.values.data(), rows, rows);
  G.noalias() = A * B.adjoint();
  G *= std::pow(box.spacing(), N - k);
  return g;
}

// Kinetic commutator -(hbar^2/2) sum_j (d^2_{x_j} - d^2_{x'_j}) gamma.
DensityKernel kinetic_commutator(const DensityKernel& g, double hbar) {
  const int k = g.k;
  const auto dims = fft::cube(g.box.n, 2 * k);
  DensityKernel out = g;
  fft::forward(out.values, dims);
  const auto n = static_cast<std::size_t>(g.box.n);
  for (std::size_t f = 0; f < out.values.size(); ++f) {
    double lhs = 0.0, rhs = 0.0;
    for (int p = 0; p < 2 * k; ++p) {
      const double xi = g.box.wavenumber(static_cast<int>(coord(f, p, 2 * k, n)));
      (p < k ? lhs : rhs) += xi * xi;
    }
    out.values[f] *= 0.5 * hbar * hbar * (lhs - rhs);
  }
  fft::inverse(out.values, dims);
  return out;
}

}  // namespace

void check_memory(const BoxSpec& box, int N, std::size_t cap) {
  if (N < 2 || N > 3) throw ValidationError("N-body runs support N in {2, 3}", "scales.N");
  if (box.d != 1) throw ValidationError("N-body runs are one-dimensional", "box.d");
  const std::size_t need = ipow(static_cast<std::size_t>(box.n), N);
  if (need > cap) {
    int n_max = 8;
    while (ipow(static_cast<std::size_t>(n_max) * 2, N) <= cap) n_max *= 2;
    throw MemoryBudgetError("N-body grid needs " + std::to_string(need) + " complex values (n = " +
                                std::to_string(box.n) + ", N = " + std::to_string(N) + "), cap is " +
                                std::to_string(cap) + "; largest admissible n is " + std::to_string(n_max),
                            need);
  }
}

NBodyWaveFunction product_state(const Field& phi, int N, const PhysicalScales& scales, std::size_t cap) {
  check_memory(phi.box(), N, cap);
  if (std::abs(scales.N - N) > 0) throw ValidationError("scales.N must equal the particle count", "scales.N");
  NBodyWaveFunction w{phi.box(), N, {}, scales};
  const auto n = static_cast<std::size_t>(phi.box().n);
  w.psi.assign(ipow(n, N), 1.0);
  for (std::size_t f = 0; f < w.psi.size(); ++f)
    for (int p = 0; p < N; ++p) w.psi[f] *= phi[coord(f, p, N, n)];
  return w;
}

double norm(const NBodyWaveFunction& w) {
  double s = 0.0;
  for (const auto& v : w.psi) s += std::norm(v);
  return std::sqrt(s * std::pow(w.box.spacing(), w.N));
}

double symmetry_defect(const NBodyWaveFunction& w) {
  const auto n = static_cast<std::size_t>(w.box.n);
  std::vector<std::size_t> stride(static_cast<std::size_t>(w.N));
  for (int p = 0; p < w.N; ++p) stride[static_cast<std::size_t>(p)] = ipow(n, w.N - 1 - p);
  double worst = 0.0;
  for (int a = 0; a < w.N; ++a)
    for (int b = a + 1; b < w.N; ++b)
      for (std::size_t f = 0; f < w.size(); ++f) {
        const std::size_t ca = coord(f, a, w.N, n), cb = coord(f, b, w.N, n);
        const std::size_t g = f - ca * stride[static_cast<std::size_t>(a)] - cb * stride[static_cast<std::size_t>(b)] +
                              cb * stride[static_cast<std::size_t>(a)] + ca * stride[static_cast<std::size_t>(b)];
        worst = std::max(worst, std::abs(w.psi[f] - w.psi[g]));
      }
  return worst;
}

Solver::Solver(const BoxSpec& box, int N, const Field& v_n, double hbar, double dt)
    : box_(box), N_(N), dims_(fft::cube(box.n, N)) {
  check_memory(box, N, std::numeric_limits<std::size_t>::max());
  require_same_box(box, v_n.box(), "nbody::Solver");
  if (!(hbar > 0.0) || !(dt > 0.0)) throw ValidationError("hbar and dt must be positive");
  const auto k2 = total_xi2(box, N);
  half_phase_.resize(k2.size());
  for (std::size_t f = 0; f < k2.size(); ++f) half_phase_[f] = std::polar(1.0, -hbar * k2[f] * dt / 4.0);
  const auto u = pair_potential(box, N, v_n);
  pair_phase_.resize(u.size());
  double umax = 0.0;
  for (std::size_t f = 0; f < u.size(); ++f) {
    pair_phase_[f] = std::polar(1.0, -u[f] * dt / hbar);
    umax = std::max(umax, std::abs(u[f]));
  }
  if (umax > 0.0 && dt > 0.5 * hbar / umax) warnings_ = 1;
}

void Solver::kinetic_half(std::vector<cplx>& psi) const {
  fft::forward(psi, dims_);
  for (std::size_t f = 0; f < psi.size(); ++f) psi[f] *= half_phase_[f];
  fft::inverse(psi, dims_);
}

void Solver::step(std::vector<cplx>& psi) const {
  if (psi.size() != half_phase_.size()) throw ValidationError("wave function does not match the solver grid");
  kinetic_half(psi);
  for (std::size_t f = 0; f < psi.size(); ++f) psi[f] *= pair_phase_[f];
  kinetic_half(psi);
}

NBodyWaveFunction nbody_step(const NBodyWaveFunction& w, const Field& v_n, double dt) {
  Solver s(w.box, w.N, v_n, w.scales.hbar, dt);
  NBodyWaveFunction out = w;
  s.step(out.psi);
  return out;
}

void evolve(NBodyWaveFunction& w, const Field& v_n, double dt, int steps, int every,
            const std::function<void(int, const NBodyWaveFunction&)>& on_snapshot) {
  if (every < 1) throw ValidationError("snapshot cadence must be >= 1", "solver.every");
  Solver s(w.box, w.N, v_n, w.scales.hbar, dt);
  for (int i = 0; i <= steps; ++i) {
    if (on_snapshot && (i % every == 0 || i == steps)) on_snapshot(i, w);
    if (i < steps) s.step(w.psi);
  }
}

DensityKernel marginal(const NBodyWaveFunction& w, int k) {
  if (k < 1 || k >= w.N) throw ValidationError("marginal order must satisfy 1 <= k < N");
  return cross_marginal(w.box, w.N, k, w.psi, w.psi);
}

DensityKernel density_matrix(const NBodyWaveFunction& w) { return cross_marginal(w.box, w.N, w.N, w.psi, w.psi); }

TraceObservables trace_observables(const DensityKernel& g1, const DensityKernel& g2, const Field& v_n, double hbar) {
  if (g1.k != 1 || g2.k != 2) throw ValidationError("trace observables need gamma1 and gamma2");
  require_same_box(g1.box, g2.box, "trace_observables");
  require_same_box(g1.box, v_n.box(), "trace_observables");
  const auto& box = g1.box;
  const auto n = static_cast<std::size_t>(box.n);
  TraceObservables t{diagonal(g1), Field(box), Field(box)};
  for (std::size_t c = 0; c < n; ++c) {
    Field col(box);
    for (std::size_t r = 0; r < n; ++r) col[r] = g1(r, c);
    t.momentum[c] = hbar * grid::spectral_derivative(col, 0)[c].imag();
  }
  const double h = box.spacing();
  for (std::size_t x = 0; x < n; ++x) {
    double s = 0.0;
    for (std::size_t y = 0; y < n; ++y) s += pair_value(v_n, x, y) * g2(x * n + y, x * n + y).real();
    t.pressure[x] = s * h;
  }
  return t;
}

std::vector<double> bbgky_residual(const std::vector<NBodySnapshot>& traj, int k, const Field& v_n,
                                   bool drop_collision) {
  if (traj.size() < 3) throw ValidationError("hierarchy residual needs at least three snapshots");
  const auto& first = traj.front().psi;
  if (k < 1 || k + 1 > first.N) throw ValidationError("hierarchy residual needs 1 <= k < N");
  const double dt = traj[1].t - traj[0].t;
  for (std::size_t i = 1; i < traj.size(); ++i)
    if (std::abs(traj[i].t - traj[i - 1].t - dt) > 1e-9 * dt) throw ValidationError("snapshot cadence is not uniform");
  const int N = first.N;
  const auto& box = first.box;
  const auto n = static_cast<std::size_t>(box.n);
  const double hbar = first.scales.hbar;

  std::vector<double> out;
  for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
    const auto& psi = traj[i].psi;
    DensityKernel res = (marginal(traj[i + 1].psi, k) - marginal(traj[i - 1].psi, k)) * cplx(0.0, hbar / (2 * dt));
    const auto g = marginal(psi, k);
    res -= kinetic_commutator(g, hbar);
    const std::size_t m = g.dim();
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t c = 0; c < m; ++c) {
        double vr = 0.0, vc = 0.0;
        for (int a = 0; a < k; ++a)
          for (int b = a + 1; b < k; ++b) {
            vr += pair_value(v_n, coord(r, a, k, n), coord(r, b, k, n));
            vc += pair_value(v_n, coord(c, a, k, n), coord(c, b, k, n));
          }
        res(r, c) -= (vr - vc) / N * g(r, c);
      }
    if (!drop_collision) {
      for (int j = 0; j < k; ++j) {
        std::vector<cplx> vpsi(psi.psi.size());
        for (std::size_t f = 0; f < vpsi.size(); ++f)
          vpsi[f] = pair_value(v_n, coord(f, j, N, n), coord(f, k, N, n)) * psi.psi[f];
        const auto coll = cross_marginal(box, N, k, vpsi, psi.psi) - cross_marginal(box, N, k, psi.psi, vpsi);
        res -= coll * cplx(static_cast<double>(N - k) / N);
      }
    }
    out.push_back(hs_norm(res));
  }
  return out;
}

double energy_moment(const NBodyWaveFunction& w, int k, const Field& v_n) {
  if (k < 1 || k > 2) throw ValidationError("energy moments are available for k in {1, 2}");
  require_same_box(w.box, v_n.box(), "energy_moment");
  const auto dims = fft::cube(w.box.n, w.N);
  const auto k2 = total_xi2(w.box, w.N);
  const auto u = pair_potential(w.box, w.N, v_n);
  const double hbar = w.scales.hbar;
  std::vector<cplx> a = w.psi;
  fft::forward(a, dims);
  for (std::size_t f = 0; f < a.size(); ++f) a[f] *= 0.5 * hbar * hbar * k2[f];
  fft::inverse(a, dims);
  for (std::size_t f = 0; f < a.size(); ++f) a[f] = (a[f] + u[f] * w.psi[f]) / static_cast<double>(w.N) + w.psi[f];
  cplx s = 0.0;
  if (k == 1)
    for (std::size_t f = 0; f < a.size(); ++f) s += std::conj(w.psi[f]) * a[f];
  else
    for (std::size_t f = 0; f < a.size(); ++f) s += std::norm(a[f]);
  return s.real() * std::pow(w.box.spacing(), w.N);
}

std::vector<ComparisonRow> compare_with_hnls(const std::vector<NBodySnapshot>& nbody,
                                             const std::vector<std::pair<double, Field>>& hnls, const Field& v_n,
                                             double hbar) {
  if (nbody.size() != hnls.size()) throw ValidationError("trajectories have different snapshot counts");
  std::vector<ComparisonRow> rows;
  PhysicalScales s;
  s.hbar = hbar;
  for (std::size_t i = 0; i < nbody.size(); ++i) {
    if (std::abs(nbody[i].t - hnls[i].first) > 1e-12) throw ValidationError("trajectory clocks differ");
    const auto& w = nbody[i].psi;
    require_same_box(w.box, hnls[i].second.box(), "compare_with_hnls");
    const auto obs = trace_observables(marginal(w, 1), w.N == 2 ? density_matrix(w) : marginal(w, 2), v_n, hbar);
    const auto q = hnls::densities(hnls::WaveFunction{hnls[i].second, s});
    const auto pressure = q.rho * grid::periodic_convolution(v_n, q.rho).real_part();
    const Field dj = obs.momentum - q.J[0];
    rows.push_back(ComparisonRow{nbody[i].t, grid::l2_norm(obs.mass - q.rho), grid::lp_norm(dj, 1.0),
                                 grid::lp_norm(dj, 1.25), grid::lp_norm(obs.pressure - pressure, 1.0)});
  }
  return rows;
}

NBodyScene make_nbody_scene(int N, int n, double hbar, bool interacting, double beta) {
  NBodyScene sc;
  sc.box = BoxSpec::make(1, 6.0, n);
  sc.scales = PhysicalScales::make(hbar, N, beta, 1);
  const double k = 2 * std::numbers::pi / sc.box.L;
  const double s2 = 0.25;
  sc.phi0 = Field::from_function(sc.box, [&](const Point& x) {
    const double amp = std::exp(-x[0] * x[0] / (4 * s2)) / std::pow(2 * std::numbers::pi * s2, 0.25);
    return std::polar(amp, -0.3 / k * std::cos(k * x[0]) / hbar);
  });
  sc.phi0 *= cplx(1.0 / grid::l2_norm(sc.phi0));
  const double nb = std::pow(static_cast<double>(N), beta);
  sc.v_n = Field::from_function(sc.box, [&](const Point& x) {
    return cplx(interacting ? nb * std::exp(-nb * nb * x[0] * x[0]) : 0.0);
  });
  sc.b0 = grid::integrate_re(sc.v_n);
  return sc;
}

}  // namespace elab::nbody
