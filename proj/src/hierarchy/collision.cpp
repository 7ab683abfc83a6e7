#include <string>

#include "elab/hierarchy.hpp"

namespace elab::hierarchy {

namespace {

// Grid index of x_i - x_l on the periodic box.
std::size_t difference_index(std::size_t i, std::size_t l, std::size_t n) { return (i + n + n / 2 - l) % n; }

}  // namespace

DensityKernel collision_apply(const DensityKernel& g, const Field& v, int j, CollisionSign sign) {
  require_same_box(g.box, v.box(), "collision_apply");
  if (g.k < 2) throw ValidationError("collision needs a kernel of order >= 2");
  const int k = g.k - 1;
  if (j < 1 || j > k)
    throw ValidationError("collision index j = " + std::to_string(j) + " outside [1, " + std::to_string(k) + "]");

  DensityKernel out(g.box, k);
  const std::size_t n = static_cast<std::size_t>(g.box.n), m = out.dim(), big = g.dim();
  std::size_t stride = 1;  // place value of x_j inside an order-k multi-index
  for (int i = j; i < k; ++i) stride *= n;
  const double h = g.box.spacing();
  // weights of V(x_j - y) and V(x'_j - y)
  const double wp = sign == CollisionSign::Minus ? 0.0 : 1.0;
  const double wm = sign == CollisionSign::Plus ? 0.0 : (sign == CollisionSign::Minus ? 1.0 : -1.0);

  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t xj = (r / stride) % n;
    for (std::size_t c = 0; c < m; ++c) {
      const std::size_t xpj = (c / stride) % n;
      cplx acc{};
      for (std::size_t y = 0; y < n; ++y) {
        const cplx gv = g.values[(r * n + y) * big + c * n + y];
        acc += (wp * v[difference_index(xj, y, n)].real() + wm * v[difference_index(xpj, y, n)].real()) * gv;
      }
      out(r, c) = acc * h;
    }
  }
  return out;
}

}  // namespace elab::hierarchy
