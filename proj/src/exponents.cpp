#include "fraclap/exponents.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>

#include "fraclap/error.hpp"
#include "fraclap/fracops.hpp"

namespace fraclap {

void ModelParams::validate() const {
  if (N != 1 && N != 2) throw ValidationError("dimension N must be 1 or 2");
  if (!(m > 0.0) || !std::isfinite(m)) throw ValidationError("nonlinearity exponent m must be positive");
  if (!(s > 0.0 && s < 1.0)) throw ValidationError("fractional order s must lie in (0, 1)");
  if (p && !(*p >= 1.0)) throw ValidationError("Lp index p must be >= 1");
  if (fprime0 && !(*fprime0 > 0.0)) throw ValidationError("reaction slope f'(0) must be positive");
}

ExponentTable derive_exponents(const ModelParams& prm) {
  prm.validate();
  using ld = long double;
  const ld N = prm.N, m = prm.m, s = prm.s;
  ExponentTable t;
  t.m_c = static_cast<double>(std::max<ld>(N - 2 * s, 0) / N);
  t.m_1 = static_cast<double>(N / (N + 2 * s));
  t.m_ex = static_cast<double>((N + 2 - 2 * s) / (N + 2 * s));
  if (m < 1) t.p_star = static_cast<double>((1 - m) * N / (2 * s));
  const ld den = N * (m - 1) + 2 * s;
  if (den > 0) {
    t.alpha = static_cast<double>(N / den);
    t.beta = static_cast<double>(1 / den);
  }
  if (prm.p) {
    const ld p = *prm.p;
    const ld dp = m - 1 + 2 * s * p / N;
    if (dp > 0) {
      const ld ap = 1 / dp;
      t.alpha_p = static_cast<double>(ap);
      t.delta_p = static_cast<double>(2 * s * p * ap / N);
    }
  }
  const ld dt = 2 * s + (N + 1) * (m - 1);
  if (dt > 0) t.theta_11 = static_cast<double>(1 / dt);
  if (prm.fprime0) {
    const ld f = *prm.fprime0;
    if (m < 1) t.sigma_1 = static_cast<double>((1 - m) * f / (2 * s));
    t.sigma_2 = static_cast<double>(f / (N + 2 * s));
    if (den > 0) t.sigma_3 = static_cast<double>((1 + 2 * (m - 1) * (1 / den) * s) * f / (N + 2 * s));
  }
  return t;
}

LinearKernelConstants linear_kernel_constants(int N) {
  if (N != 1 && N != 2) throw ValidationError("linear kernel supports N = 1 or 2");
  const double k = (N + 1) / 2.0;
  return {1.0, boost::math::tgamma(k) / std::pow(std::numbers::pi, k)};
}

double linear_kernel_eval(double r, double t, int N) {
  if (!(t > 0.0)) throw ValidationError("linear kernel needs t > 0");
  auto c = linear_kernel_constants(N);
  const double xi = std::abs(r) / t;
  return std::pow(t, -N) * c.C * std::pow(c.a * c.a + xi * xi, -(N + 1) / 2.0);
}

double critical_m_ex(int N, double s) { return (N + 2.0 - 2.0 * s) / (N + 2.0 * s); }

namespace {
double huang_unit_integral(int N, double s) {
  return std::pow(std::numbers::pi, N / 2.0) * boost::math::tgamma(s) / boost::math::tgamma((N + 2.0 * s) / 2.0);
}

void require_m_ex(const ModelParams& prm) {
  prm.validate();
  if (std::abs(prm.m - critical_m_ex(prm.N, prm.s)) > 1e-12) {
    std::ostringstream os;
    os << "explicit profile requires m = m_ex = " << critical_m_ex(prm.N, prm.s) << ", got " << prm.m;
    throw ValidationError(os.str());
  }
}
}  // namespace

double huang_mass(double lambda, double R, int N, double s) {
  return lambda * std::pow(R, -2.0 * s) * huang_unit_integral(N, s);
}

double huang_profile_eval(double r, double t, double lambda, double R, const ModelParams& prm) {
  require_m_ex(prm);
  if (!(lambda > 0.0 && R > 0.0)) throw ValidationError("profile parameters must be positive");
  if (!(t > 0.0)) throw ValidationError("profile needs t > 0");
  auto e = derive_exponents(prm);
  const double y = std::abs(r) * std::pow(t, -*e.beta);
  return std::pow(t, -*e.alpha) * lambda * std::pow(R * R + y * y, -(prm.N + 2.0 * prm.s) / 2.0);
}

double huang_residual(double M, double R, const ModelParams& prm, const HuangCalibrationOptions& opt) {
  require_m_ex(prm);
  if (prm.N != 1) throw ValidationError("profile calibration is implemented for N = 1");
  auto e = derive_exponents(prm);
  const double a = *e.alpha, b = *e.beta;
  const double lambda = M * std::pow(R, 2.0 * prm.s) / huang_unit_integral(prm.N, prm.s);
  const double k = (prm.N + 2.0 * prm.s) / 2.0;
  GridSpec g(1, opt.n, opt.L);
  Field um(g), ut(g);
  for (std::size_t i = 0; i < g.n; ++i) {
    const double y = g.coord(i);
    const double q = R * R + y * y;
    const double F = lambda * std::pow(q, -k);
    const double dF = -2.0 * k * y * lambda * std::pow(q, -k - 1.0);
    um[i] = std::pow(F, prm.m);
    ut[i] = -(a * F + b * y * dF);
  }
  Field lap = frac_laplacian_spectral(um, FracOrder(prm.s));
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < g.n; ++i) {
    if (std::abs(g.coord(i)) > g.L / 2) continue;
    num = std::max(num, std::abs(ut[i] + lap[i]));
    den = std::max(den, std::abs(ut[i]));
  }
  return num / den;
}

HuangCalibration calibrate_huang(double M, const ModelParams& prm, const HuangCalibrationOptions& opt) {
  require_m_ex(prm);
  if (!(M > 0.0)) throw ValidationError("mass must be positive");
  auto f = [&](double lr) { return huang_residual(M, std::exp(lr), prm, opt); };
  // Coarse scan to isolate the basin, then Brent.
  const int scan = 49;
  double best = INFINITY, best_lr = opt.log_r_min;
  const double step = (opt.log_r_max - opt.log_r_min) / (scan - 1);
  for (int i = 0; i < scan; ++i) {
    double lr = opt.log_r_min + step * i;
    double v = f(lr);
    if (v < best) best = v, best_lr = lr;
  }
  std::uintmax_t iters = 200;
  auto r = boost::math::tools::brent_find_minima(f, best_lr - step, best_lr + step, 40, iters);
  if (iters >= 200 || !std::isfinite(r.second)) throw NumericalError("profile calibration did not converge");
  const double R = std::exp(r.first);
  if (r.first <= opt.log_r_min + 1e-9 || r.first >= opt.log_r_max - 1e-9)
    throw NumericalError("profile calibration hit the search bracket");
  return {M * std::pow(R, 2.0 * prm.s) / huang_unit_integral(prm.N, prm.s), R, r.second};
}

double extinction_space_exponent(const ModelParams& prm) { return 2.0 * prm.s / (1.0 - prm.m); }

namespace {
void require_extinction(const ModelParams& prm) {
  prm.validate();
  auto e = derive_exponents(prm);
  if (!(prm.m < e.m_c)) {
    std::ostringstream os;
    os << "extinction solution needs m < m_c = " << e.m_c << ", got m = " << prm.m;
    throw ValidationError(os.str());
  }
}
}  // namespace

double extinction_solution_eval(double r, double t, double C, double T, const ModelParams& prm) {
  require_extinction(prm);
  if (!(C > 0.0 && T > 0.0)) throw ValidationError("extinction parameters must be positive");
  if (t >= T) return 0.0;
  if (r == 0.0) return INFINITY;
  return std::pow(C * (T - t), 1.0 / (1.0 - prm.m)) * std::pow(std::abs(r), -extinction_space_exponent(prm));
}

ExtinctionConstant solve_extinction_constant(const ModelParams& prm, const ExtinctionConstantOptions& opt) {
  require_extinction(prm);
  if (prm.N != 1) throw ValidationError("extinction constant is computed for N = 1");
  const double q = extinction_space_exponent(prm);
  const double a = q * prm.m;
  GridSpec g(1, opt.n, opt.L);
  if (!(opt.r_inner > g.h() && opt.r_outer < g.L)) throw ValidationError("annulus must lie inside the box");
  QuadratureOperator op(g, FracOrder(prm.s));
  auto power = [a](double x) { return std::pow(std::abs(x), -a); };
  Field f(g);
  for (std::size_t i = 0; i < g.n; ++i) {
    const double x = g.coord(i);
    // Cell average at the singular node.
    f[i] = x == 0.0 ? std::pow(0.5 * g.h(), -a) / (1.0 - a) : power(x);
  }
  auto ext = op.exterior_contribution(power);
  Field lap(g);
  op.apply(f.values.data(), lap.values.data(), ext.data());
  // At T - t = 1: dt U + (-Delta)^s U^m = C^{m/(1-m)} (-C/(1-m) |x|^{-q} + lap).
  std::vector<double> ratio;
  for (std::size_t i = 0; i < g.n; ++i) {
    const double r = std::abs(g.coord(i));
    if (r < opt.r_inner || r > opt.r_outer) continue;
    ratio.push_back((1.0 - prm.m) * lap[i] * std::pow(r, q));
  }
  if (ratio.empty()) throw ValidationError("annulus contains no grid points");
  auto residual = [&](double C) {
    double sum = 0.0;
    for (double v : ratio) sum += 1.0 - v / C;
    return sum / static_cast<double>(ratio.size());
  };
  double lo = 1e-12, hi = 1e12;
  if (!(residual(lo) < 0.0 && residual(hi) > 0.0))
    throw NumericalError("extinction constant: residual does not change sign; discretization too coarse");
  std::uintmax_t iters = 200;
  auto br = boost::math::tools::toms748_solve(residual, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
  const double C = 0.5 * (br.first + br.second);
  double worst = 0.0;
  for (double v : ratio) worst = std::max(worst, std::abs(1.0 - v / C));
  if (worst > opt.tolerance) {
    std::ostringstream os;
    os << "extinction constant: residual " << worst << " on the annulus exceeds " << opt.tolerance;
    throw NumericalError(os.str());
  }
  return {C, worst};
}

}  // namespace fraclap
