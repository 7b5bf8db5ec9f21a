#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace gapsol {

using cplx = std::complex<double>;

/// Uniform periodic mesh on [-L/2, L/2) with its discrete momentum mirror.
///
/// L is an integer number of lattice periods (the lattice period is pi) and
/// N is a power of two. Momenta are stored twice: in FFT storage order for
/// the transforms, and sorted ascending for output.
class Grid {
 public:
  Grid(double domain_length, std::size_t num_points);

  std::size_t size() const noexcept { return n_; }
  double length() const noexcept { return length_; }
  double spacing() const noexcept { return spacing_; }
  int periods() const noexcept { return periods_; }
  double momentum_step() const noexcept;

  double x(std::size_t i) const noexcept { return positions_[i]; }
  std::span<const double> positions() const noexcept { return positions_; }

  /// k in FFT storage order: 0, dk, ..., (N/2-1)dk, -N/2 dk, ..., -dk.
  std::span<const double> momenta() const noexcept { return momenta_fft_; }
  /// k_n = 2 pi n / L for n in [-N/2, N/2), ascending.
  std::span<const double> momentum_values() const noexcept { return momenta_sorted_; }

  bool operator==(const Grid& other) const noexcept {
    return n_ == other.n_ && length_ == other.length_;
  }

 private:
  std::size_t n_;
  double length_;
  double spacing_;
  int periods_;
  std::vector<double> positions_;
  std::vector<double> momenta_fft_;
  std::vector<double> momenta_sorted_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Validating factory; throws InvalidArgument for a non-integral period count
/// or a size that is not a power of two >= 64.
GridPtr make_grid(double domain_length, std::size_t num_points);

/// Complex samples of a field on a Grid.
class ComplexField {
 public:
  /// Empty placeholder without a grid; assign before use.
  ComplexField() = default;
  explicit ComplexField(GridPtr grid);
  ComplexField(GridPtr grid, std::vector<cplx> values);

  template <class F>
  static ComplexField from_function(GridPtr grid, F&& f) {
    std::vector<cplx> v(grid->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid->x(i));
    return ComplexField(std::move(grid), std::move(v));
  }

  const Grid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }

  std::span<const cplx> values() const noexcept { return values_; }
  std::span<cplx> values() noexcept { return values_; }
  const std::vector<cplx>& data() const noexcept { return values_; }

  cplx operator[](std::size_t i) const noexcept { return values_[i]; }
  cplx& operator[](std::size_t i) noexcept { return values_[i]; }

  bool is_finite() const noexcept;
  double max_abs() const noexcept;

  ComplexField& operator+=(const ComplexField& other);
  ComplexField& operator-=(const ComplexField& other);
  ComplexField& operator*=(cplx s) noexcept;

  friend ComplexField operator+(ComplexField a, const ComplexField& b) { return a += b; }
  friend ComplexField operator-(ComplexField a, const ComplexField& b) { return a -= b; }
  friend ComplexField operator*(cplx s, ComplexField a) { return a *= s; }
  friend ComplexField operator*(ComplexField a, cplx s) { return a *= s; }

  ComplexField conj() const;

 private:
  GridPtr grid_;
  std::vector<cplx> values_;
};

/// Throws InvalidArgument unless both fields live on equal grids.
void require_same_grid(const ComplexField& a, const ComplexField& b);

/// Sup-norm of a - b.
double max_abs_diff(const ComplexField& a, const ComplexField& b);

}  // namespace gapsol
