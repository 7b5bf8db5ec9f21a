#include "gapsol/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <vector>

#include "gapsol/errors.hpp"

namespace gapsol {

struct Fft::Plans {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
  ~Plans() {
    if (forward) fftw_destroy_plan(forward);
    if (inverse) fftw_destroy_plan(inverse);
  }
};

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

Fft::Fft(std::size_t n) : n_(n) {
  if (n == 0) throw InvalidArgument("FFT length must be positive");
  static std::map<std::size_t, std::shared_ptr<const Plans>> cache;
  std::lock_guard lock(planner_mutex());
  auto it = cache.find(n);
  if (it == cache.end()) {
    auto plans = std::make_shared<Plans>();
    std::vector<cplx> scratch(n);
    const int len = static_cast<int>(n);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    plans->forward = fftw_plan_dft_1d(len, as_fftw(scratch.data()), as_fftw(scratch.data()),
                                      FFTW_FORWARD, flags);
    plans->inverse = fftw_plan_dft_1d(len, as_fftw(scratch.data()), as_fftw(scratch.data()),
                                      FFTW_BACKWARD, flags);
    if (!plans->forward || !plans->inverse) throw NumericalError("FFTW planning failed");
    it = cache.emplace(n, std::move(plans)).first;
  }
  plans_ = it->second;
}

void Fft::forward(std::span<cplx> data) const {
  if (data.size() != n_) throw InvalidArgument("FFT length mismatch");
  fftw_execute_dft(plans_->forward, as_fftw(data.data()), as_fftw(data.data()));
}

void Fft::inverse(std::span<cplx> data) const {
  if (data.size() != n_) throw InvalidArgument("FFT length mismatch");
  fftw_execute_dft(plans_->inverse, as_fftw(data.data()), as_fftw(data.data()));
  const double scale = 1.0 / static_cast<double>(n_);
  for (cplx& z : data) z *= scale;
}

void apply_fourier_multiplier(const Fft& fft, std::span<cplx> data,
                              std::span<const cplx> multiplier) {
  fft.forward(data);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] *= multiplier[i];
  fft.inverse(data);
}

void apply_fourier_multiplier(const Fft& fft, std::span<cplx> data,
                              std::span<const double> multiplier) {
  fft.forward(data);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] *= multiplier[i];
  fft.inverse(data);
}

ComplexField second_derivative(const ComplexField& f) {
  const Grid& g = f.grid();
  std::vector<double> mult(g.size());
  const auto k = g.momenta();
  for (std::size_t i = 0; i < mult.size(); ++i) mult[i] = -k[i] * k[i];
  ComplexField out(f);
  apply_fourier_multiplier(Fft(g.size()), out.values(), std::span<const double>(mult));
  return out;
}

ComplexField first_derivative(const ComplexField& f) {
  const Grid& g = f.grid();
  std::vector<cplx> mult(g.size());
  const auto k = g.momenta();
  for (std::size_t i = 0; i < mult.size(); ++i) mult[i] = cplx(0.0, k[i]);
  mult[g.size() / 2] = 0.0;
  ComplexField out(f);
  apply_fourier_multiplier(Fft(g.size()), out.values(), std::span<const cplx>(mult));
  return out;
}

double norm(const ComplexField& f) {
  double s = 0.0;
  for (const cplx& z : f.values()) s += std::norm(z);
  return s * f.grid().spacing();
}

cplx inner(const ComplexField& a, const ComplexField& b) {
  require_same_grid(a, b);
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s * a.grid().spacing();
}

double quadrature_project(const ComplexField& local_oscillator, const ComplexField& f) {
  return inner(local_oscillator, f).real();
}

ComplexField to_momentum(const ComplexField& f) {
  const std::size_t n = f.size();
  std::vector<cplx> buf(f.values().begin(), f.values().end());
  Fft(n).forward(buf);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<cplx> out(n);
  // Storage index m (signed s) lands at ascending index s + N/2; the (-1)^s
  // factor comes from the grid starting at x = -L/2.
  for (std::size_t m = 0; m < n; ++m) {
    const std::size_t dest = (m + n / 2) % n;
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    out[dest] = sign * scale * buf[m];
  }
  return ComplexField(f.grid_ptr(), std::move(out));
}

ComplexField from_momentum(const ComplexField& spectrum) {
  const std::size_t n = spectrum.size();
  std::vector<cplx> buf(n);
  const double scale = std::sqrt(static_cast<double>(n));
  for (std::size_t m = 0; m < n; ++m) {
    const std::size_t src = (m + n / 2) % n;
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    buf[m] = sign * scale * spectrum[src];
  }
  Fft(n).inverse(buf);
  return ComplexField(spectrum.grid_ptr(), std::move(buf));
}

ComplexField translate(const ComplexField& f, double shift) {
  const Grid& g = f.grid();
  std::vector<cplx> mult(g.size());
  const auto k = g.momenta();
  for (std::size_t i = 0; i < mult.size(); ++i) mult[i] = std::polar(1.0, -k[i] * shift);
  // Keep the Nyquist mode real so real fields stay real.
  mult[g.size() / 2] = std::cos(k[g.size() / 2] * shift);
  ComplexField out(f);
  apply_fourier_multiplier(Fft(g.size()), out.values(), std::span<const cplx>(mult));
  return out;
}

}  // namespace gapsol
