#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "elab/grid.hpp"

namespace elab {

namespace {
bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }
}  // namespace

BoxSpec BoxSpec::make(int d, double L, int n) {
  if (d < 1 || d > 3) throw ValidationError("dimension must be 1, 2 or 3", "box.d");
  if (!(L > 0.0) || !std::isfinite(L)) throw ValidationError("edge length must be positive", "box.L");
  if (n < 8 || !is_power_of_two(n))
    throw ValidationError("points per axis must be a power of two >= 8, got " + std::to_string(n),
                          "box.n");
  return BoxSpec{d, L, n};
}

double BoxSpec::cell_volume() const noexcept { return std::pow(spacing(), d); }

std::size_t BoxSpec::size() const noexcept {
  std::size_t s = 1;
  for (int a = 0; a < d; ++a) s *= static_cast<std::size_t>(n);
  return s;
}

double BoxSpec::wavenumber(int i) const noexcept {
  const int m = i < n / 2 ? i : i - n;
  return 2.0 * std::numbers::pi / L * m;
}

std::array<int, 3> BoxSpec::unflatten(std::size_t flat) const noexcept {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = d - 1; a >= 0; --a) {
    idx[static_cast<std::size_t>(a)] = static_cast<int>(flat % static_cast<std::size_t>(n));
    flat /= static_cast<std::size_t>(n);
  }
  return idx;
}

Point BoxSpec::point(std::size_t flat) const noexcept {
  const auto idx = unflatten(flat);
  Point p{0.0, 0.0, 0.0};
  for (int a = 0; a < d; ++a) p[static_cast<std::size_t>(a)] = coord(idx[static_cast<std::size_t>(a)]);
  return p;
}

std::size_t BoxSpec::reflect(std::size_t flat) const noexcept {
  const auto idx = unflatten(flat);
  std::size_t out = 0;
  for (int a = 0; a < d; ++a) {
    const int i = idx[static_cast<std::size_t>(a)];
    out = out * static_cast<std::size_t>(n) + static_cast<std::size_t>((n - i) % n);
  }
  return out;
}

void require_same_box(const BoxSpec& a, const BoxSpec& b, const char* where) {
  if (!(a == b)) throw ValidationError(std::string("box mismatch in ") + where);
}

Field::Field(const BoxSpec& box, cplx fill) : box_(box), values_(box.size(), fill) {}

Field::Field(const BoxSpec& box, std::vector<cplx> values) : box_(box), values_(std::move(values)) {
  if (values_.size() != box_.size())
    throw ValidationError("value count " + std::to_string(values_.size()) + " does not match n^d = " +
                          std::to_string(box_.size()));
}

Field Field::from_function(const BoxSpec& box, const std::function<cplx(const Point&)>& f) {
  Field out(box);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(box.point(i));
  return out;
}

Field& Field::operator+=(const Field& o) {
  require_same_box(box_, o.box_, "Field::operator+=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& o) {
  require_same_box(box_, o.box_, "Field::operator-=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

Field& Field::operator*=(const Field& o) {
  require_same_box(box_, o.box_, "Field::operator*=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] *= o.values_[i];
  return *this;
}

Field& Field::operator*=(cplx s) {
  for (auto& v : values_) v *= s;
  return *this;
}

Field Field::real_part() const {
  Field out(box_);
  for (std::size_t i = 0; i < values_.size(); ++i) out[i] = values_[i].real();
  return out;
}

Field Field::abs2() const {
  Field out(box_);
  for (std::size_t i = 0; i < values_.size(); ++i) out[i] = std::norm(values_[i]);
  return out;
}

Field Field::conj() const {
  Field out(box_);
  for (std::size_t i = 0; i < values_.size(); ++i) out[i] = std::conj(values_[i]);
  return out;
}

double Field::imag_ratio() const {
  double im = 0.0, n2 = 0.0;
  for (const auto& v : values_) {
    im = std::max(im, std::abs(v.imag()));
    n2 += std::norm(v);
  }
  const double norm = std::sqrt(n2 * box_.cell_volume());
  return norm > 0.0 ? im / norm : 0.0;
}

double Field::max_abs() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v));
  return m;
}

double Field::min_real() const {
  double m = values_.empty() ? 0.0 : values_.front().real();
  for (const auto& v : values_) m = std::min(m, v.real());
  return m;
}

double Field::max_real() const {
  double m = values_.empty() ? 0.0 : values_.front().real();
  for (const auto& v : values_) m = std::max(m, v.real());
  return m;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(Field a, const Field& b) { return a *= b; }
Field operator*(Field a, cplx s) { return a *= s; }
Field operator*(cplx s, Field a) { return a *= s; }

VectorField::VectorField(const BoxSpec& box) {
  components.reserve(static_cast<std::size_t>(box.d));
  for (int j = 0; j < box.d; ++j) components.emplace_back(box);
}

VectorField::VectorField(std::vector<Field> comps) : components(std::move(comps)) {
  if (components.empty()) throw ValidationError("vector field needs at least one component");
  for (const auto& c : components) require_same_box(components.front().box(), c.box(), "VectorField");
}

}  // namespace elab
