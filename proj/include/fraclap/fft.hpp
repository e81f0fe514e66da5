#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "fraclap/grid.hpp"

namespace fraclap {

// Real-to-complex transform over a periodic grid (1-D or 2-D). Each instance
// owns its plans and work buffers, so an instance must not be shared between
// threads; separate instances are independent.
class RealFFT {
 public:
  explicit RealFFT(const GridSpec& g);
  ~RealFFT();
  RealFFT(const RealFFT&) = delete;
  RealFFT& operator=(const RealFFT&) = delete;

  const GridSpec& grid() const { return grid_; }
  std::size_t spectral_size() const { return nspec_; }

  void forward(const double* in, std::complex<double>* out);
  // Normalized inverse: inverse(forward(u)) == u.
  void inverse(const std::complex<double>* in, double* out);

  // |xi| for every spectral index, xi = pi*k/L per axis.
  const std::vector<double>& wavenumber() const { return xi_; }
  // Hermitian multiplicity of each spectral index (1 or 2) for Parseval sums.
  const std::vector<double>& multiplicity() const { return mult_; }

 private:
  GridSpec grid_;
  std::size_t nspec_;
  double* rbuf_;
  void* cbuf_;
  void* fwd_;
  void* inv_;
  std::vector<double> xi_;
  std::vector<double> mult_;
};

// Type-I discrete sine transform on n interior points (unnormalized, FFTW RODFT00).
class SineTransform {
 public:
  explicit SineTransform(std::size_t n);
  ~SineTransform();
  SineTransform(const SineTransform&) = delete;
  SineTransform& operator=(const SineTransform&) = delete;

  std::size_t size() const { return n_; }
  // out_k = 2 * sum_j in_j sin(pi (j+1)(k+1)/(n+1)).
  void apply(const double* in, double* out);

 private:
  std::size_t n_;
  double* in_;
  double* out_;
  void* plan_;
};

}  // namespace fraclap
