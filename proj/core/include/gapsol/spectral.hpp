#pragma once

#include <cstddef>
#include <memory>
#include <span>

#include "gapsol/grid.hpp"

namespace gapsol {

/// In-place complex FFT of a fixed length, backed by a process-wide plan cache.
///
/// Plans are created once per length under a lock; execution is reentrant,
/// so one Fft may be shared by any number of threads.
class Fft {
 public:
  explicit Fft(std::size_t n);

  std::size_t size() const noexcept { return n_; }

  /// Unnormalized forward transform, sum_j f_j exp(-2 pi i j m / N).
  void forward(std::span<cplx> data) const;
  /// Inverse transform including the 1/N factor.
  void inverse(std::span<cplx> data) const;

 private:
  struct Plans;
  std::size_t n_;
  std::shared_ptr<const Plans> plans_;
};

/// Multiplies the spectrum of `data` by `multiplier` (FFT storage order).
void apply_fourier_multiplier(const Fft& fft, std::span<cplx> data,
                              std::span<const cplx> multiplier);
void apply_fourier_multiplier(const Fft& fft, std::span<cplx> data,
                              std::span<const double> multiplier);

/// Spectral d2f/dx2 (multiplier -k^2).
ComplexField second_derivative(const ComplexField& f);
/// Spectral df/dx (multiplier ik, Nyquist mode dropped).
ComplexField first_derivative(const ComplexField& f);

/// sum |f_i|^2 dx.
double norm(const ComplexField& f);
/// sum conj(a_i) b_i dx.
cplx inner(const ComplexField& a, const ComplexField& b);

/// Homodyne projection Re integral conj(lo) f dx, i.e. the c-number analogue
/// of (1/2) integral (lo* f + lo f*) dx.
double quadrature_project(const ComplexField& local_oscillator, const ComplexField& f);

/// Unitary DFT. The result holds f^(k_n) for the ascending momentum_values()
/// of the same grid, with the phase convention
/// f^(k) = N^{-1/2} sum_j f(x_j) exp(-i k x_j).
ComplexField to_momentum(const ComplexField& f);
ComplexField from_momentum(const ComplexField& spectrum);

/// f(x - shift) on the periodic domain, exact for the trigonometric interpolant.
ComplexField translate(const ComplexField& f, double shift);

}  // namespace gapsol
