#pragma once

#include <complex>
#include <vector>

#include "frontlab/grid.hpp"

namespace frontlab {

using cplx = std::complex<double>;

/// Thin RAII wrapper over FFTW 1-D transforms with Fourier-series
/// normalization: forward() returns coefficients c_n such that
///   u(x_j) = sum_n c_n exp(i k_n x_j),  k_n = n*pi/L.
/// Plan creation is serialized internally (FFTW planning is not
/// thread-safe); execution on per-instance buffers is.
class Fft {
 public:
  explicit Fft(int n);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  int size() const { return n_; }
  int spectrum_size() const { return n_ / 2 + 1; }

  /// Real field -> coefficients for n = 0..N/2 (negative n by conjugacy).
  void forward(const std::vector<double>& in, std::vector<cplx>& out) const;
  void inverse(const std::vector<cplx>& in, std::vector<double>& out) const;

  /// Complex field -> full coefficient set, index layout as FFTW (0..N-1,
  /// frequencies n and n-N for n > N/2), same series normalization.
  void forward_c(const std::vector<cplx>& in, std::vector<cplx>& out) const;
  void inverse_c(const std::vector<cplx>& in, std::vector<cplx>& out) const;

 private:
  int n_;
  void* plan_r2c_;
  void* plan_c2r_;
  void* plan_fwd_;
  void* plan_bwd_;
  double* rbuf_;
  void* cbuf_;   // fftw_complex[n/2+1]
  void* zin_;    // fftw_complex[n]
  void* zout_;   // fftw_complex[n]
};

/// Spectral derivative of given order on the periodic grid.
std::vector<double> spectral_derivative(const Fft& fft, const GridSpec& g,
                                        const std::vector<double>& u, int order);

/// Exact band-limited translation u(x) -> u(x - s).
std::vector<double> spectral_shift(const Fft& fft, const GridSpec& g,
                                   const std::vector<double>& u, double s);
Field spectral_shift(const Fft& fft, const Field& u, double s);

}  // namespace frontlab
