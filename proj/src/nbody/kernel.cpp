#include "elab/kernel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>

#include "elab/snapshot.hpp"

namespace elab::nbody {

namespace {

std::size_t ipow(std::size_t b, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

Eigen::MatrixXcd as_operator(const DensityKernel& g) {
  const auto m = static_cast<Eigen::Index>(g.dim());
  Eigen::MatrixXcd a(m, m);
  const double w = std::pow(g.box.spacing(), g.k);
  for (Eigen::Index r = 0; r < m; ++r)
    for (Eigen::Index c = 0; c < m; ++c) a(r, c) = g(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) * w;
  // symmetrise away round-off so the Hermitian solver sees an exact Hermitian matrix
  return 0.5 * (a + a.adjoint());
}

}  // namespace

DensityKernel::DensityKernel(const BoxSpec& b, int order) : box(b), k(order) {
  if (b.d != 1) throw ValidationError("density kernels are one-dimensional");
  if (order < 1) throw ValidationError("kernel order must be >= 1");
  values.assign(dim() * dim(), cplx{});
}

std::size_t DensityKernel::dim() const noexcept { return ipow(static_cast<std::size_t>(box.n), k); }

DensityKernel& DensityKernel::operator+=(const DensityKernel& o) {
  require_same_box(box, o.box, "DensityKernel +=");
  if (k != o.k) throw ValidationError("kernel orders differ");
  for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
  return *this;
}

DensityKernel& DensityKernel::operator-=(const DensityKernel& o) {
  require_same_box(box, o.box, "DensityKernel -=");
  if (k != o.k) throw ValidationError("kernel orders differ");
  for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
  return *this;
}

DensityKernel& DensityKernel::operator*=(cplx s) {
  for (auto& v : values) v *= s;
  return *this;
}

DensityKernel operator+(DensityKernel a, const DensityKernel& b) { return a += b; }
DensityKernel operator-(DensityKernel a, const DensityKernel& b) { return a -= b; }
DensityKernel operator*(DensityKernel a, cplx s) { return a *= s; }

DensityKernel outer_power(const Field& phi, int k) {
  const auto& box = phi.box();
  DensityKernel g(box, k);
  const std::size_t n = static_cast<std::size_t>(box.n), m = g.dim();
  std::vector<cplx> prod(m, 1.0);
  for (std::size_t r = 0; r < m; ++r) {
    std::size_t rest = r;
    for (int a = 0; a < k; ++a) {
      prod[r] *= phi[rest % n];
      rest /= n;
    }
  }
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < m; ++c) g(r, c) = prod[r] * std::conj(prod[c]);
  return g;
}

double hermiticity_defect(const DensityKernel& g) {
  double worst = 0.0;
  for (std::size_t r = 0; r < g.dim(); ++r)
    for (std::size_t c = r; c < g.dim(); ++c) worst = std::max(worst, std::abs(g(r, c) - std::conj(g(c, r))));
  return worst;
}

cplx trace(const DensityKernel& g) {
  cplx s = 0.0;
  for (std::size_t r = 0; r < g.dim(); ++r) s += g(r, r);
  return s * std::pow(g.box.spacing(), g.k);
}

double hs_norm(const DensityKernel& g) {
  double s = 0.0;
  for (const auto& v : g.values) s += std::norm(v);
  return std::sqrt(s) * std::pow(g.box.spacing(), g.k);
}

double max_abs(const DensityKernel& g) {
  double m = 0.0;
  for (const auto& v : g.values) m = std::max(m, std::abs(v));
  return m;
}

double min_eigenvalue(const DensityKernel& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(as_operator(g), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double compressed_min_eigenvalue(const DensityKernel& g, int rank, std::uint64_t seed) {
  const auto m = static_cast<Eigen::Index>(g.dim());
  if (rank < 1 || rank > m) throw ValidationError("compression rank out of range");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXcd draw(m, rank);
  for (Eigen::Index c = 0; c < rank; ++c)
    for (Eigen::Index r = 0; r < m; ++r) draw(r, c) = cplx(normal(rng), normal(rng));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(draw);
  const Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(m, rank);
  const Eigen::MatrixXcd small = q.adjoint() * as_operator(g) * q;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (small + small.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

DensityKernel partial_trace(const DensityKernel& g) {
  if (g.k < 2) throw ValidationError("partial trace needs a kernel of order >= 2");
  DensityKernel out(g.box, g.k - 1);
  const std::size_t n = static_cast<std::size_t>(g.box.n), m = out.dim();
  const double h = g.box.spacing();
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < m; ++c) {
      cplx s = 0.0;
      for (std::size_t y = 0; y < n; ++y) s += g(r * n + y, c * n + y);
      out(r, c) = s * h;
    }
  return out;
}

Field diagonal(const DensityKernel& g1) {
  if (g1.k != 1) throw ValidationError("diagonal needs an order-1 kernel");
  Field f(g1.box);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = g1(i, i);
  return f;
}

void write_kernel(std::ostream& os, const DensityKernel& g) {
  snapshot::write(os, snapshot::Header{snapshot::kKernelVersion, g.box, static_cast<std::uint32_t>(g.k)}, g.values);
}

DensityKernel read_kernel(std::istream& is) {
  const auto h = snapshot::read_header(is);
  if (h.version != snapshot::kKernelVersion) throw Error("snapshot: not a kernel file");
  DensityKernel g(h.box, static_cast<int>(h.k));
  g.values = snapshot::read_payload(is, h);
  return g;
}

}  // namespace elab::nbody
