#pragma once

#include <complex>
#include <span>
#include <vector>

namespace elab::fft {

using cplx = std::complex<double>;

/// In-place unnormalized forward DFT (exponent -i) over a row-major array
/// of the given shape.
void forward(std::span<cplx> data, std::span<const int> dims);
/// In-place inverse DFT, normalized by 1/size.
void inverse(std::span<cplx> data, std::span<const int> dims);

/// Convenience for n^rank cubes.
std::vector<int> cube(int n, int rank);

}  // namespace elab::fft
