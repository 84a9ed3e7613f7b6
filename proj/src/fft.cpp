#include "frontlab/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>

namespace frontlab {

namespace {
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Fft::Fft(int n) : n_(n) {
  std::lock_guard<std::mutex> lock(plan_mutex());
  rbuf_ = fftw_alloc_real(n);
  cbuf_ = fftw_alloc_complex(n / 2 + 1);
  zin_ = fftw_alloc_complex(n);
  zout_ = fftw_alloc_complex(n);
  plan_r2c_ = fftw_plan_dft_r2c_1d(n, rbuf_, static_cast<fftw_complex*>(cbuf_), FFTW_ESTIMATE);
  plan_c2r_ = fftw_plan_dft_c2r_1d(n, static_cast<fftw_complex*>(cbuf_), rbuf_, FFTW_ESTIMATE);
  plan_fwd_ = fftw_plan_dft_1d(n, static_cast<fftw_complex*>(zin_), static_cast<fftw_complex*>(zout_),
                               FFTW_FORWARD, FFTW_ESTIMATE);
  plan_bwd_ = fftw_plan_dft_1d(n, static_cast<fftw_complex*>(zin_), static_cast<fftw_complex*>(zout_),
                               FFTW_BACKWARD, FFTW_ESTIMATE);
}

Fft::~Fft() {
  std::lock_guard<std::mutex> lock(plan_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_r2c_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_c2r_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
  fftw_free(rbuf_);
  fftw_free(cbuf_);
  fftw_free(zin_);
  fftw_free(zout_);
}

void Fft::forward(const std::vector<double>& in, std::vector<cplx>& out) const {
  std::memcpy(rbuf_, in.data(), sizeof(double) * n_);
  fftw_execute(static_cast<fftw_plan>(plan_r2c_));
  out.resize(spectrum_size());
  const auto* c = static_cast<const fftw_complex*>(cbuf_);
  const double scale = 1.0 / n_;
  for (int i = 0; i < spectrum_size(); ++i) out[i] = cplx(c[i][0], c[i][1]) * scale;
}

void Fft::inverse(const std::vector<cplx>& in, std::vector<double>& out) const {
  auto* c = static_cast<fftw_complex*>(cbuf_);
  for (int i = 0; i < spectrum_size(); ++i) {
    c[i][0] = in[i].real();
    c[i][1] = in[i].imag();
  }
  fftw_execute(static_cast<fftw_plan>(plan_c2r_));
  out.resize(n_);
  std::memcpy(out.data(), rbuf_, sizeof(double) * n_);
}

void Fft::forward_c(const std::vector<cplx>& in, std::vector<cplx>& out) const {
  auto* z = static_cast<fftw_complex*>(zin_);
  for (int i = 0; i < n_; ++i) {
    z[i][0] = in[i].real();
    z[i][1] = in[i].imag();
  }
  fftw_execute(static_cast<fftw_plan>(plan_fwd_));
  out.resize(n_);
  const auto* w = static_cast<const fftw_complex*>(zout_);
  const double scale = 1.0 / n_;
  for (int i = 0; i < n_; ++i) out[i] = cplx(w[i][0], w[i][1]) * scale;
}

void Fft::inverse_c(const std::vector<cplx>& in, std::vector<cplx>& out) const {
  auto* z = static_cast<fftw_complex*>(zin_);
  for (int i = 0; i < n_; ++i) {
    z[i][0] = in[i].real();
    z[i][1] = in[i].imag();
  }
  fftw_execute(static_cast<fftw_plan>(plan_bwd_));
  out.resize(n_);
  const auto* w = static_cast<const fftw_complex*>(zout_);
  for (int i = 0; i < n_; ++i) out[i] = cplx(w[i][0], w[i][1]);
}

std::vector<double> spectral_derivative(const Fft& fft, const GridSpec& g,
                                        const std::vector<double>& u, int order) {
  std::vector<cplx> c;
  fft.forward(u, c);
  const int nh = fft.spectrum_size();
  for (int n = 0; n < nh; ++n) {
    cplx ik(0.0, g.wavenumber(n));
    cplx f = 1.0;
    for (int p = 0; p < order; ++p) f *= ik;
    c[n] *= f;
  }
  // Nyquist mode of an odd derivative has no consistent real representation.
  if (order % 2 == 1 && fft.size() % 2 == 0) c[nh - 1] = 0.0;
  std::vector<double> out;
  fft.inverse(c, out);
  return out;
}

std::vector<double> spectral_shift(const Fft& fft, const GridSpec& g,
                                   const std::vector<double>& u, double s) {
  std::vector<cplx> c;
  fft.forward(u, c);
  const int nh = fft.spectrum_size();
  for (int n = 0; n < nh; ++n) {
    double k = g.wavenumber(n);
    c[n] *= cplx(std::cos(k * s), -std::sin(k * s));
  }
  if (fft.size() % 2 == 0) c[nh - 1] = cplx(c[nh - 1].real() * std::cos(g.wavenumber(nh - 1) * s), 0.0);
  std::vector<double> out;
  fft.inverse(c, out);
  return out;
}

Field spectral_shift(const Fft& fft, const Field& u, double s) {
  Field out = u;
  for (int c = 0; c < u.components(); ++c)
    out[c] = spectral_shift(fft, u.grid, u[c], s);
  return out;
}

}  // namespace frontlab
