#include "fraclap/fracops.hpp"

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fraclap/error.hpp"

namespace fraclap {

namespace {

double sup_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

std::vector<std::complex<double>> forward(RealFFT& fft, const std::vector<double>& v) {
  std::vector<std::complex<double>> out(fft.spectral_size());
  fft.forward(v.data(), out.data());
  return out;
}

// Composite Simpson on a uniform grid; Simpson 3/8 closes an odd interval count.
double simpson(const std::vector<double>& f, double dx) {
  const std::size_t n = f.size();
  if (n < 4) throw ValidationError("simpson rule needs at least 4 nodes");
  std::size_t intervals = n - 1;
  std::size_t end = intervals % 2 == 0 ? n - 1 : n - 4;
  double sum = 0.0;
  for (std::size_t i = 0; i + 2 <= end; i += 2) sum += f[i] + 4.0 * f[i + 1] + f[i + 2];
  sum *= dx / 3.0;
  if (end != n - 1) sum += 3.0 * dx / 8.0 * (f[end] + 3.0 * f[end + 1] + 3.0 * f[end + 2] + f[end + 3]);
  return sum;
}

}  // namespace

FracOrder::FracOrder(double s_) : s(s_) {
  if (!(s > kMin && s < kMax)) {
    std::ostringstream os;
    os << "fractional order s=" << s << " outside the supported band (" << kMin << ", " << kMax << ")";
    throw ValidationError(os.str());
  }
}

double quadrature_constant(int N, double s) {
  using boost::math::tgamma;
  return std::pow(2.0, 2.0 * s) * s * tgamma((N + 2.0 * s) / 2.0) /
         (std::pow(std::numbers::pi, N / 2.0) * tgamma(1.0 - s));
}

double extension_constant(double sigma) {
  using boost::math::tgamma;
  return std::pow(2.0, sigma - 1.0) * tgamma(sigma / 2.0) / tgamma(1.0 - sigma / 2.0);
}

// ---------------------------------------------------------------- spectral

SymbolOperator::SymbolOperator(const GridSpec& g, std::vector<double> symbol)
    : fft_(std::make_unique<RealFFT>(g)), symbol_(std::move(symbol)), work_(fft_->spectral_size()) {
  if (symbol_.size() != fft_->spectral_size()) throw ValidationError("symbol length does not match grid");
}

SymbolOperator SymbolOperator::spectral(const GridSpec& g, double s) {
  RealFFT probe(g);
  std::vector<double> sym(probe.spectral_size());
  for (std::size_t k = 0; k < sym.size(); ++k) {
    double xi = probe.wavenumber()[k];
    sym[k] = xi == 0.0 ? 0.0 : std::pow(xi, 2.0 * s);
  }
  return SymbolOperator(g, std::move(sym));
}

void SymbolOperator::apply(const double* in, double* out) {
  fft_->forward(in, work_.data());
  for (std::size_t k = 0; k < work_.size(); ++k) work_[k] *= symbol_[k];
  fft_->inverse(work_.data(), out);
}

void SymbolOperator::apply_dealiased(const double* in, double* out) {
  const GridSpec& g = fft_->grid();
  fft_->forward(in, work_.data());
  const std::size_t nh = g.n / 2 + 1;
  const double cut = static_cast<double>(g.n) / 3.0;
  auto axis = [&](std::size_t k) {
    long kk = static_cast<long>(k);
    if (kk > static_cast<long>(g.n / 2)) kk -= static_cast<long>(g.n);
    return static_cast<double>(std::labs(kk));
  };
  for (std::size_t k = 0; k < work_.size(); ++k) {
    bool keep = g.dim == 1 ? static_cast<double>(k) <= cut
                           : (axis(k / nh) <= cut && static_cast<double>(k % nh) <= cut);
    work_[k] = keep ? work_[k] * symbol_[k] : 0.0;
  }
  fft_->inverse(work_.data(), out);
}

double SymbolOperator::diagonal() const {
  double sum = 0.0;
  for (std::size_t k = 0; k < symbol_.size(); ++k) sum += fft_->multiplicity()[k] * symbol_[k];
  return sum / static_cast<double>(fft_->grid().size());
}

double SymbolOperator::max_symbol() const { return *std::max_element(symbol_.begin(), symbol_.end()); }

Field frac_laplacian_spectral(const Field& g, FracOrder s) {
  g.validate();
  auto op = SymbolOperator::spectral(g.grid, s.s);
  Field out(g.grid);
  op.apply(g.values.data(), out.values.data());
  return out;
}

Field riesz_inverse(const Field& g, FracOrder s) {
  g.validate();
  double mean = 0.0;
  for (double v : g.values) mean += v;
  mean /= static_cast<double>(g.size());
  if (std::abs(mean) > 1e-10 * std::max(sup_abs(g.values), 1e-300) && std::abs(mean) > 0.0) {
    std::ostringstream os;
    os << "riesz_inverse: field mean " << mean << " is not zero; inversion is ill-posed";
    throw ValidationError(os.str());
  }
  RealFFT fft(g.grid);
  std::vector<double> sym(fft.spectral_size());
  for (std::size_t k = 0; k < sym.size(); ++k) {
    double xi = fft.wavenumber()[k];
    sym[k] = xi == 0.0 ? 0.0 : std::pow(xi, -2.0 * s.s);
  }
  SymbolOperator op(g.grid, std::move(sym));
  Field out(g.grid);
  op.apply(g.values.data(), out.values.data());
  return out;
}

// ---------------------------------------------------------------- semigroup

std::vector<double> semigroup_multiplier(const std::vector<double>& xi, double s, const SemigroupWindow& w) {
  if (!(w.t_min > 0.0 && w.t_min < w.t_max)) throw ValidationError("semigroup window needs 0 < t_min < t_max");
  if (w.nodes < 32) throw ValidationError("semigroup quadrature needs at least 32 nodes");
  const double a = std::log(w.t_min), b = std::log(w.t_max);
  const double dtau = (b - a) / (w.nodes - 1);
  const double inv_gamma = 1.0 / boost::math::tgamma(-s);
  std::vector<double> t(w.nodes), tpow(w.nodes);
  for (int i = 0; i < w.nodes; ++i) {
    double tau = a + dtau * i;
    t[i] = std::exp(tau);
    tpow[i] = std::exp(-s * tau);
  }
  const double small = std::pow(w.t_min, 1.0 - s) / (1.0 - s);
  const double large = std::pow(w.t_max, -s) / s;
  std::vector<double> out(xi.size()), f(w.nodes);
  for (std::size_t k = 0; k < xi.size(); ++k) {
    const double lam = xi[k] * xi[k];
    if (lam == 0.0) {
      out[k] = 0.0;
      continue;
    }
    for (int i = 0; i < w.nodes; ++i) f[i] = std::expm1(-lam * t[i]) * tpow[i];
    double integral = simpson(f, dtau) - lam * small - large;
    out[k] = integral * inv_gamma;
  }
  return out;
}

OperatorResult frac_laplacian_semigroup(const Field& g, FracOrder s, double t_min, double t_max, int nodes,
                                        double tolerance) {
  g.validate();
  SemigroupWindow w{t_min, t_max, nodes};
  RealFFT fft(g.grid);
  auto mult = semigroup_multiplier(fft.wavenumber(), s.s, w);
  SemigroupWindow half = w;
  half.nodes = (nodes + 1) / 2;
  auto mult_half = semigroup_multiplier(fft.wavenumber(), s.s, half);

  auto ghat = forward(fft, g.values);
  const double norm = 1.0 / static_cast<double>(g.size());
  const double abs_gamma = std::abs(boost::math::tgamma(-s.s));
  double lap_sup_bound = 0.0, trunc = 0.0, disc = 0.0;
  for (std::size_t k = 0; k < ghat.size(); ++k) {
    const double amp = fft.multiplicity()[k] * std::abs(ghat[k]) * norm;
    const double lam = fft.wavenumber()[k] * fft.wavenumber()[k];
    lap_sup_bound += amp * lam;
    if (lam > 0.0) {
      trunc += amp * (lam * lam * std::pow(t_min, 2.0 - s.s) / (2.0 * (2.0 - s.s)) +
                      std::exp(-t_max * lam) * std::pow(t_max, -s.s) / s.s);
    }
    disc += amp * std::abs(mult[k] - mult_half[k]);
  }
  trunc /= abs_gamma;

  OperatorResult res;
  res.field = Field(g.grid);
  SymbolOperator op(g.grid, mult);
  op.apply(g.values.data(), res.field.values.data());
  res.meta["small_t_remainder_bound"] = lap_sup_bound * std::pow(t_min, 1.0 - s.s) / ((1.0 - s.s) * abs_gamma);
  res.meta["truncation_error_estimate"] = trunc;
  res.meta["discretization_error_estimate"] = disc;
  res.meta["t_min"] = t_min;
  res.meta["t_max"] = t_max;
  res.meta["nodes"] = nodes;
  const double scale = sup_abs(res.field.values);
  if (scale > 0.0 && trunc > tolerance * scale) {
    std::ostringstream os;
    os << "semigroup quadrature window too narrow: truncation estimate " << trunc << " exceeds " << tolerance
       << " relative";
    throw NumericalError(os.str());
  }
  return res;
}

// ---------------------------------------------------------------- extension

void ExtensionMesh::validate(double h) const {
  if (y.size() < 16) throw ValidationError("extension mesh needs at least 16 nodes");
  if (!(gamma > 1.0)) throw ValidationError("extension mesh grading exponent must exceed 1");
  if (!(y[0] > 0.0)) throw ValidationError("extension mesh nodes must be positive");
  for (std::size_t j = 1; j < y.size(); ++j)
    if (!(y[j] > y[j - 1])) throw ValidationError("extension mesh nodes must increase strictly");
  if (y[0] > h * (1.0 + 1e-12)) throw ValidationError("extension mesh first node is coarser than the grid spacing");
}

ExtensionMesh ExtensionMesh::coarsened() const {
  ExtensionMesh c;
  c.gamma = gamma;
  for (std::size_t j = 1; j < y.size(); j += 2) c.y.push_back(y[j]);
  if (c.y.back() != y.back()) c.y.push_back(y.back());
  return c;
}

ExtensionMesh make_extension_mesh(const GridSpec& g, FracOrder s, std::size_t M, double cap, double gamma) {
  const double h = g.h();
  if (cap <= 0.0) cap = 10.0 * g.L;
  if (gamma <= 0.0) gamma = 2.0 / s.sigma();
  bool automatic = M == 0;
  if (automatic) {
    M = 2048;
    double need = std::ceil(std::pow(cap / h, 1.0 / gamma));
    if (need > static_cast<double>(M)) M = static_cast<std::size_t>(need);
  }
  ExtensionMesh mesh;
  mesh.gamma = gamma;
  mesh.y.resize(M);
  for (std::size_t j = 1; j <= M; ++j)
    mesh.y[j - 1] = cap * std::pow(static_cast<double>(j) / static_cast<double>(M), gamma);
  mesh.validate(h);
  return mesh;
}

std::vector<double> extension_multiplier(const std::vector<double>& xi, double s, const ExtensionMesh& mesh) {
  const double sigma = 2.0 * s;
  const double mu = extension_constant(sigma);
  const std::size_t M = mesh.size();
  // Nodes y_0 = 0, y_1..y_M; unknowns v_1..v_{M-1}.
  std::vector<double> y(M + 1);
  y[0] = 0.0;
  for (std::size_t j = 0; j < M; ++j) y[j + 1] = mesh.y[j];
  std::vector<double> c(M), mass(M);
  for (std::size_t j = 0; j < M; ++j) c[j] = sigma / (std::pow(y[j + 1], sigma) - std::pow(y[j], sigma));
  auto mid = [&](std::size_t j) { return 0.5 * (y[j] + y[j + 1]); };
  const double e = 2.0 - sigma;
  mass[0] = std::pow(mid(0), e) / e;
  for (std::size_t j = 1; j < M; ++j) mass[j] = (std::pow(mid(j), e) - std::pow(mid(j - 1), e)) / e;

  std::vector<double> out(xi.size(), 0.0);
  std::vector<double> diag(M), upper(M), rhs(M);
  for (std::size_t k = 0; k < xi.size(); ++k) {
    const double x2 = xi[k] * xi[k];
    if (x2 == 0.0) continue;
    const std::size_t nu = M - 1;
    // Row j (1-based unknown index): -c_{j-1} v_{j-1} + (c_{j-1}+c_j+x2 m_j) v_j - c_j v_{j+1} = 0.
    for (std::size_t r = 0; r < nu; ++r) {
      const std::size_t j = r + 1;
      diag[r] = c[j - 1] + c[j] + x2 * mass[j];
      upper[r] = -c[j];
      rhs[r] = j == 1 ? c[0] : 0.0;
    }
    // Thomas algorithm; the lower band equals -c_{j-1}.
    for (std::size_t r = 1; r < nu; ++r) {
      const double lower = -c[r];
      if (diag[r - 1] == 0.0) throw NumericalError("extension solve: zero pivot");
      const double f = lower / diag[r - 1];
      diag[r] -= f * upper[r - 1];
      rhs[r] -= f * rhs[r - 1];
    }
    std::vector<double>& v = rhs;
    if (diag[nu - 1] == 0.0) throw NumericalError("extension solve: zero pivot");
    v[nu - 1] = rhs[nu - 1] / diag[nu - 1];
    for (std::size_t r = nu - 1; r-- > 0;) v[r] = (rhs[r] - upper[r] * v[r + 1]) / diag[r];
    const double flux = c[0] * (v[0] - 1.0) - x2 * mass[0];
    if (!std::isfinite(flux)) throw NumericalError("extension solve: non-finite flux");
    out[k] = -mu * flux;
  }
  return out;
}

OperatorResult frac_laplacian_extension(const Field& g, FracOrder s, const ExtensionMesh& mesh) {
  g.validate();
  if (g.grid.dim != 1) throw ValidationError("extension realization is 1-D only");
  mesh.validate(g.grid.h());
  RealFFT probe(g.grid);
  auto fine = extension_multiplier(probe.wavenumber(), s.s, mesh);
  auto coarse = extension_multiplier(probe.wavenumber(), s.s, mesh.coarsened());

  OperatorResult res;
  res.field = Field(g.grid);
  Field rc(g.grid);
  SymbolOperator(g.grid, fine).apply(g.values.data(), res.field.values.data());
  SymbolOperator(g.grid, coarse).apply(g.values.data(), rc.values.data());
  double diff = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) diff = std::max(diff, std::abs(res.field[i] - rc[i]));
  const double scale = sup_abs(res.field.values);
  res.meta["mu_sigma"] = extension_constant(s.sigma());
  res.meta["mesh_nodes"] = static_cast<double>(mesh.size());
  res.meta["mesh_cap"] = mesh.cap();
  res.meta["mesh_gamma"] = mesh.gamma;
  res.meta["coarse_difference"] = scale > 0.0 ? diff / scale : 0.0;
  if (scale > 0.0 && diff > 0.1 * scale)
    throw NumericalError("extension mesh too coarse: flux changes by more than 10% under coarsening");
  return res;
}

// ---------------------------------------------------------------- quadrature

QuadratureOperator::QuadratureOperator(const GridSpec& g, FracOrder s) : grid_(g), s_(s.s) {
  if (g.dim != 1) throw ValidationError("quadrature realization is 1-D only");
  const std::size_t J = g.n;
  const double h = g.h();
  const double p1 = 2.0 - 2.0 * s_, p2 = 3.0 - 2.0 * s_;
  // Interpolation weights for Q = D/y^2 on nodes y_j = j h, integrated against y^{1-2s}.
  std::vector<double> wq(J + 1, 0.0);
  for (std::size_t j = 0; j < J; ++j) {
    const double a = h * static_cast<double>(j), b = h * static_cast<double>(j + 1);
    const double i1 = (std::pow(b, p1) - std::pow(a, p1)) / p1;
    const double i2 = (std::pow(b, p2) - std::pow(a, p2)) / p2;
    wq[j] += (b * i1 - i2) / h;
    wq[j + 1] += (i2 - a * i1) / h;
  }
  w_.assign(J + 1, 0.0);
  for (std::size_t j = 1; j <= J; ++j) {
    const double y = h * static_cast<double>(j);
    w_[j] = wq[j] / (y * y);
  }
  // Q(0) from the even Taylor expansion D(y) = a y^2 + b y^4: Q0 = (4 Q1 - Q2) / 3.
  w_[1] += wq[0] * 4.0 / (3.0 * h * h);
  w_[2] -= wq[0] / (3.0 * 4.0 * h * h);

  const double Y = h * static_cast<double>(J);
  double sum = 0.0;
  for (std::size_t j = 1; j <= J; ++j) sum += w_[j];
  W_ = 2.0 * sum + 2.0 * std::pow(Y, -2.0 * s_) / (2.0 * s_);
  C_ = quadrature_constant(1, s_);

  // Toeplitz part through a 2n circulant embedding.
  GridSpec big(1, 2 * g.n, 2.0 * g.L);
  fft_ = std::make_unique<RealFFT>(big);
  std::vector<double> k(2 * g.n, 0.0);
  for (std::size_t d = 1; d < g.n; ++d) {
    k[d] = w_[d];
    k[2 * g.n - d] = w_[d];
  }
  kernel_hat_.resize(fft_->spectral_size());
  fft_->forward(k.data(), kernel_hat_.data());
  work_c_.resize(fft_->spectral_size());
  work_r_.resize(2 * g.n);
}

void QuadratureOperator::apply(const double* g, double* out, const double* exterior) {
  const std::size_t n = grid_.n;
  std::fill(work_r_.begin(), work_r_.end(), 0.0);
  std::copy(g, g + n, work_r_.begin());
  fft_->forward(work_r_.data(), work_c_.data());
  for (std::size_t k = 0; k < work_c_.size(); ++k) work_c_[k] *= kernel_hat_[k];
  fft_->inverse(work_c_.data(), work_r_.data());
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = C_ * (W_ * g[i] - work_r_[i]);
    if (exterior) out[i] -= exterior[i];
  }
}

std::vector<double> QuadratureOperator::exterior_contribution(const std::function<double(double)>& e) const {
  // Exterior nodes within the weight table are summed with the same weights as
  // interior ones; offsets beyond Y = n h use the continuous kernel, matching
  // the analytic tail already counted in the total weight.
  const std::size_t n = grid_.n;
  const double h = grid_.h();
  const double Y = h * static_cast<double>(n);
  const double p = 1.0 + 2.0 * s_;
  std::vector<double> right(n + 1), left(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    right[k] = e(grid_.L + h * static_cast<double>(k));
    left[k] = e(-grid_.L - h * static_cast<double>(k + 1));
  }
  boost::math::quadrature::exp_sinh<double> integrator;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid_.coord(i);
    double sum = 0.0;
    // Right exterior node k sits at offset n - i + k; left node k at offset i + 1 + k.
    for (std::size_t k = 0; n - i + k <= n; ++k) sum += w_[n - i + k] * right[k];
    for (std::size_t k = 0; i + 1 + k <= n; ++k) sum += w_[i + 1 + k] * left[k];
    auto fr = [&](double z) { return e(x + Y + z) * std::pow(Y + z, -p); };
    auto fl = [&](double z) { return e(x - Y - z) * std::pow(Y + z, -p); };
    sum += integrator.integrate(fr) + integrator.integrate(fl);
    out[i] = C_ * sum;
  }
  return out;
}

OperatorResult frac_laplacian_quadrature(const Field& g, FracOrder s) {
  g.validate();
  if (g.grid.dim != 1) throw ValidationError("quadrature realization is 1-D only");
  QuadratureOperator op(g.grid, s);
  OperatorResult res;
  res.field = Field(g.grid);
  op.apply(g.values.data(), res.field.values.data());
  res.meta["constant"] = op.constant();
  res.meta["total_weight"] = op.total_weight();
  res.notes["boundary_convention"] = "zero extension outside [-L, L)";
  return res;
}

// ---------------------------------------------------------------- Dirichlet

DirichletOperator::DirichletOperator(std::size_t n, double s, std::size_t modes)
    : n_(n), eig_(n, 0.0), dst_(std::make_unique<SineTransform>(n)), work_(n) {
  if (modes == 0) modes = n;
  if (modes > n) throw ValidationError("Dirichlet mode count exceeds the grid size");
  for (std::size_t k = 0; k < modes; ++k) eig_[k] = std::pow(static_cast<double>(k + 1), 2.0 * s);
}

void DirichletOperator::apply(const double* in, double* out) {
  dst_->apply(in, work_.data());
  for (std::size_t k = 0; k < n_; ++k) work_[k] *= eig_[k];
  dst_->apply(work_.data(), out);
  const double scale = 1.0 / (2.0 * static_cast<double>(n_ + 1));
  for (std::size_t k = 0; k < n_; ++k) out[k] *= scale;
}

std::vector<double> dirichlet_spectral_apply(const std::vector<double>& g, FracOrder s, std::size_t modes) {
  for (double v : g)
    if (!std::isfinite(v)) throw ValidationError("Dirichlet input contains non-finite values");
  DirichletOperator op(g.size(), s.s, modes);
  std::vector<double> out(g.size());
  op.apply(g.data(), out.data());
  return out;
}

}  // namespace fraclap
