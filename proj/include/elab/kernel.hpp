#pragma once

// Reduced density kernels gamma^(k)(x_1..x_k; x'_1..x'_k) on a d = 1 grid,
// stored as an n^k x n^k row-major matrix: row = (x_1..x_k), column =
// (x'_1..x'_k), each multi-index axis-major. As an operator,
// (gamma f)(x) = sum_x' gamma(x; x') f(x') h^k.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "elab/grid.hpp"

namespace elab::nbody {

struct DensityKernel {
  BoxSpec box;  // one-particle box, d = 1
  int k = 1;
  std::vector<cplx> values;

  DensityKernel() = default;
  DensityKernel(const BoxSpec& box, int k);

  std::size_t dim() const noexcept;  // n^k
  cplx& operator()(std::size_t row, std::size_t col) noexcept { return values[row * dim() + col]; }
  const cplx& operator()(std::size_t row, std::size_t col) const noexcept { return values[row * dim() + col]; }

  DensityKernel& operator+=(const DensityKernel& o);
  DensityKernel& operator-=(const DensityKernel& o);
  DensityKernel& operator*=(cplx s);
};

DensityKernel operator+(DensityKernel a, const DensityKernel& b);
DensityKernel operator-(DensityKernel a, const DensityKernel& b);
DensityKernel operator*(DensityKernel a, cplx s);

/// |phi><phi|^{(x) k}.
DensityKernel outer_power(const Field& phi, int k);

/// max |gamma(x; x') - conj(gamma(x'; x))|.
double hermiticity_defect(const DensityKernel& g);
cplx trace(const DensityKernel& g);
/// Hilbert-Schmidt norm (sum |gamma|^2 h^{2k})^{1/2}.
double hs_norm(const DensityKernel& g);
double max_abs(const DensityKernel& g);
/// Smallest eigenvalue of the operator (full Hermitian solve).
double min_eigenvalue(const DensityKernel& g);
/// Smallest eigenvalue of Q^* gamma Q for a random orthonormal Q with `rank`
/// columns (Gaussian draw from `seed`, then QR).
double compressed_min_eigenvalue(const DensityKernel& g, int rank, std::uint64_t seed);

/// Tr_{k}: contracts the last coordinate pair, order k -> k - 1.
DensityKernel partial_trace(const DensityKernel& g);

/// Diagonal gamma(x; x) of an order-1 kernel as a field.
Field diagonal(const DensityKernel& g1);

void write_kernel(std::ostream& os, const DensityKernel& g);
DensityKernel read_kernel(std::istream& is);

}  // namespace elab::nbody
