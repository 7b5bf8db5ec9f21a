#include "gapsol/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gapsol/errors.hpp"

namespace gapsol {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

int period_count(double domain_length) {
  if (!(domain_length > 0.0) || !std::isfinite(domain_length))
    throw InvalidArgument("domain length must be positive and finite");
  const double ratio = domain_length / std::numbers::pi;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio))
    throw InvalidArgument("domain length " + std::to_string(domain_length) +
                          " is not an integer multiple of the lattice period pi");
  return static_cast<int>(rounded);
}

}  // namespace

Grid::Grid(double domain_length, std::size_t num_points)
    : n_(num_points), periods_(period_count(domain_length)) {
  if (!is_power_of_two(num_points) || num_points < 64)
    throw InvalidArgument("grid size " + std::to_string(num_points) +
                          " must be a power of two >= 64");
  length_ = periods_ * std::numbers::pi;
  spacing_ = length_ / static_cast<double>(n_);

  positions_.resize(n_);
  for (std::size_t i = 0; i < n_; ++i)
    positions_[i] = -0.5 * length_ + static_cast<double>(i) * spacing_;

  const double dk = 2.0 * std::numbers::pi / length_;
  const auto half = static_cast<std::ptrdiff_t>(n_ / 2);
  momenta_fft_.resize(n_);
  momenta_sorted_.resize(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    const auto si = static_cast<std::ptrdiff_t>(i);
    const std::ptrdiff_t m = si < half ? si : si - static_cast<std::ptrdiff_t>(n_);
    momenta_fft_[i] = dk * static_cast<double>(m);
    momenta_sorted_[i] = dk * static_cast<double>(si - half);
  }
}

double Grid::momentum_step() const noexcept { return 2.0 * std::numbers::pi / length_; }

GridPtr make_grid(double domain_length, std::size_t num_points) {
  return std::make_shared<const Grid>(domain_length, num_points);
}

ComplexField::ComplexField(GridPtr grid) : grid_(std::move(grid)) {
  if (!grid_) throw InvalidArgument("field requires a grid");
  values_.assign(grid_->size(), cplx{});
}

ComplexField::ComplexField(GridPtr grid, std::vector<cplx> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw InvalidArgument("field requires a grid");
  if (values_.size() != grid_->size())
    throw InvalidArgument("field length " + std::to_string(values_.size()) +
                          " does not match grid size " + std::to_string(grid_->size()));
  if (!is_finite()) throw InvalidArgument("field contains non-finite samples");
}

bool ComplexField::is_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](cplx z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

double ComplexField::max_abs() const noexcept {
  double m = 0.0;
  for (const cplx& z : values_) m = std::max(m, std::abs(z));
  return m;
}

ComplexField& ComplexField::operator+=(const ComplexField& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

ComplexField& ComplexField::operator-=(const ComplexField& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

ComplexField& ComplexField::operator*=(cplx s) noexcept {
  for (cplx& z : values_) z *= s;
  return *this;
}

ComplexField ComplexField::conj() const {
  ComplexField out(*this);
  for (cplx& z : out.values_) z = std::conj(z);
  return out;
}

void require_same_grid(const ComplexField& a, const ComplexField& b) {
  if (!(a.grid() == b.grid())) throw InvalidArgument("fields live on different grids");
}

double max_abs_diff(const ComplexField& a, const ComplexField& b) {
  require_same_grid(a, b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace gapsol
