#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "fraclap/fft.hpp"
#include "fraclap/grid.hpp"

namespace fraclap {

// Fractional order s; sigma = 2s. Orders outside (0.05, 0.95) are rejected.
struct FracOrder {
  static constexpr double kMin = 0.05;
  static constexpr double kMax = 0.95;

  double s;
  explicit FracOrder(double s_);
  double sigma() const { return 2.0 * s; }
};

struct OperatorResult {
  Field field;
  std::map<std::string, double> meta;
  std::map<std::string, std::string> notes;
};

// C_{N,2s} = 2^{2s} s Gamma((N+2s)/2) / (pi^{N/2} Gamma(1-s)).
double quadrature_constant(int N, double s);
// mu_sigma = 2^{sigma-1} Gamma(sigma/2) / Gamma(1 - sigma/2).
double extension_constant(double sigma);

Field frac_laplacian_spectral(const Field& g, FracOrder s);
Field riesz_inverse(const Field& g, FracOrder s);

// Multiplies the Fourier coefficients of a periodic field by a radial symbol.
class SymbolOperator {
 public:
  SymbolOperator(const GridSpec& g, std::vector<double> symbol);
  static SymbolOperator spectral(const GridSpec& g, double s);

  const GridSpec& grid() const { return fft_->grid(); }
  const std::vector<double>& symbol() const { return symbol_; }
  RealFFT& fft() { return *fft_; }

  void apply(const double* in, double* out);
  // Same as apply but zeroes the top third of the spectrum first.
  void apply_dealiased(const double* in, double* out);
  // Diagonal entry of the equivalent circulant matrix.
  double diagonal() const;
  double max_symbol() const;

 private:
  std::unique_ptr<RealFFT> fft_;
  std::vector<double> symbol_;
  std::vector<std::complex<double>> work_;
};

// Semigroup realization: per-mode multiplier (1/Gamma(-s)) int (e^{-t lambda} - 1) t^{-1-s} dt
// on log-spaced nodes over [t_min, t_max] with first-order endpoint corrections.
struct SemigroupWindow {
  double t_min = 1e-6;
  double t_max = 1e3;
  int nodes = 256;
};
std::vector<double> semigroup_multiplier(const std::vector<double>& xi, double s, const SemigroupWindow& w);
OperatorResult frac_laplacian_semigroup(const Field& g, FracOrder s, double t_min, double t_max, int nodes,
                                        double tolerance = 1e-2);

// Graded mesh y_j = Y (j/M)^gamma, j = 1..M (the boundary node y_0 = 0 is implicit).
struct ExtensionMesh {
  std::vector<double> y;
  double gamma = 0.0;
  double cap() const { return y.empty() ? 0.0 : y.back(); }
  std::size_t size() const { return y.size(); }
  void validate(double h) const;
  ExtensionMesh coarsened() const;
};
// M = 0 selects the default (2048, raised until y_1 <= h); cap = 0 selects 10 L;
// gamma = 0 selects 2/sigma.
ExtensionMesh make_extension_mesh(const GridSpec& g, FracOrder s, std::size_t M = 0, double cap = 0.0,
                                  double gamma = 0.0);
std::vector<double> extension_multiplier(const std::vector<double>& xi, double s, const ExtensionMesh& mesh);
OperatorResult frac_laplacian_extension(const Field& g, FracOrder s, const ExtensionMesh& mesh);

// Singular-integral realization on [-L, L) with the field extended by zero
// (or by supplied exterior data). Symmetrized second differences, cell weights
// from exact power moments of a piecewise-linear interpolant of D(y)/y^2.
class QuadratureOperator {
 public:
  QuadratureOperator(const GridSpec& g, FracOrder s);

  const GridSpec& grid() const { return grid_; }
  double order() const { return s_; }
  // Weights w_j (without the constant C) for offsets j = 0..n; w_0 is unused.
  const std::vector<double>& weights() const { return w_; }
  // Full weight sum including both sides and the analytic far tail.
  double total_weight() const { return W_; }
  double constant() const { return C_; }
  double diagonal() const { return C_ * W_; }

  // out = (-Delta)^s g; `exterior` (may be null) is a per-node contribution from
  // data outside the box as produced by exterior_contribution.
  void apply(const double* g, double* out, const double* exterior = nullptr);
  // C * int_{outside} e(y) |x_i - y|^{-1-2s} dy for every node x_i.
  std::vector<double> exterior_contribution(const std::function<double(double)>& e) const;

 private:
  GridSpec grid_;
  double s_;
  double C_;
  double W_;
  std::vector<double> w_;
  std::unique_ptr<RealFFT> fft_;
  std::vector<std::complex<double>> kernel_hat_;
  std::vector<std::complex<double>> work_c_;
  std::vector<double> work_r_;
};

OperatorResult frac_laplacian_quadrature(const Field& g, FracOrder s);

// Spectral fractional Laplacian on (0, pi) with Dirichlet data, sampled on
// dirichlet_nodes(n). modes = 0 keeps all n modes.
std::vector<double> dirichlet_spectral_apply(const std::vector<double>& g, FracOrder s, std::size_t modes = 0);

class DirichletOperator {
 public:
  DirichletOperator(std::size_t n, double s, std::size_t modes = 0);
  void apply(const double* in, double* out);
  std::size_t size() const { return n_; }
  double max_eigenvalue() const { return *std::max_element(eig_.begin(), eig_.end()); }

 private:
  std::size_t n_;
  std::vector<double> eig_;
  std::unique_ptr<SineTransform> dst_;
  std::vector<double> work_;
};

}  // namespace fraclap
