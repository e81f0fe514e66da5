#include "fraclap/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>

#include "fraclap/error.hpp"

namespace fraclap {

namespace {
// The FFTW planner is not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

double axis_wavenumber(std::size_t k, std::size_t n, double L) {
  long kk = static_cast<long>(k);
  if (kk > static_cast<long>(n / 2)) kk -= static_cast<long>(n);
  return std::numbers::pi * static_cast<double>(std::labs(kk)) / L;
}
}  // namespace

RealFFT::RealFFT(const GridSpec& g) : grid_(g) {
  g.validate();
  const int n = static_cast<int>(g.n);
  const std::size_t nh = g.n / 2 + 1;
  nspec_ = g.dim == 1 ? nh : g.n * nh;
  rbuf_ = fftw_alloc_real(g.size());
  cbuf_ = fftw_alloc_complex(nspec_);
  auto* c = static_cast<fftw_complex*>(cbuf_);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (g.dim == 1) {
      fwd_ = fftw_plan_dft_r2c_1d(n, rbuf_, c, FFTW_ESTIMATE);
      inv_ = fftw_plan_dft_c2r_1d(n, c, rbuf_, FFTW_ESTIMATE);
    } else {
      fwd_ = fftw_plan_dft_r2c_2d(n, n, rbuf_, c, FFTW_ESTIMATE);
      inv_ = fftw_plan_dft_c2r_2d(n, n, c, rbuf_, FFTW_ESTIMATE);
    }
  }
  xi_.resize(nspec_);
  mult_.resize(nspec_);
  if (g.dim == 1) {
    for (std::size_t k = 0; k < nh; ++k) {
      xi_[k] = std::numbers::pi * static_cast<double>(k) / g.L;
      mult_[k] = (k == 0 || k == g.n / 2) ? 1.0 : 2.0;
    }
  } else {
    for (std::size_t i = 0; i < g.n; ++i)
      for (std::size_t j = 0; j < nh; ++j) {
        double a = axis_wavenumber(i, g.n, g.L);
        double b = std::numbers::pi * static_cast<double>(j) / g.L;
        xi_[i * nh + j] = std::hypot(a, b);
        mult_[i * nh + j] = (j == 0 || j == g.n / 2) ? 1.0 : 2.0;
      }
  }
}

RealFFT::~RealFFT() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(inv_));
  fftw_free(rbuf_);
  fftw_free(cbuf_);
}

void RealFFT::forward(const double* in, std::complex<double>* out) {
  std::memcpy(rbuf_, in, sizeof(double) * grid_.size());
  fftw_execute(static_cast<fftw_plan>(fwd_));
  std::memcpy(static_cast<void*>(out), cbuf_, sizeof(fftw_complex) * nspec_);
}

void RealFFT::inverse(const std::complex<double>* in, double* out) {
  std::memcpy(cbuf_, static_cast<const void*>(in), sizeof(fftw_complex) * nspec_);
  fftw_execute(static_cast<fftw_plan>(inv_));
  const double scale = 1.0 / static_cast<double>(grid_.size());
  for (std::size_t i = 0; i < grid_.size(); ++i) out[i] = rbuf_[i] * scale;
}

SineTransform::SineTransform(std::size_t n) : n_(n) {
  if (n < 1) throw ValidationError("sine transform needs at least one point");
  in_ = fftw_alloc_real(n);
  out_ = fftw_alloc_real(n);
  std::lock_guard<std::mutex> lock(planner_mutex());
  plan_ = fftw_plan_r2r_1d(static_cast<int>(n), in_, out_, FFTW_RODFT00, FFTW_ESTIMATE);
}

SineTransform::~SineTransform() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_));
  fftw_free(in_);
  fftw_free(out_);
}

void SineTransform::apply(const double* in, double* out) {
  std::memcpy(in_, in, sizeof(double) * n_);
  fftw_execute(static_cast<fftw_plan>(plan_));
  std::memcpy(out, out_, sizeof(double) * n_);
}

}  // namespace fraclap
