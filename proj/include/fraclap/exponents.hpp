#pragma once

#include <optional>
#include <string>
#include <vector>

namespace fraclap {

struct ModelParams {
  int N = 1;
  double m = 1.0;
  double s = 0.5;
  std::optional<double> p;
  std::optional<double> fprime0;

  // s may range over (0, 1) here; the operators use the narrower FracOrder band.
  void validate() const;
};

// Fields whose defining expression is not admissible for the given parameters
// are left empty.
struct ExponentTable {
  double m_c = 0.0;
  double m_1 = 0.0;
  double m_ex = 0.0;
  std::optional<double> p_star;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> alpha_p;
  std::optional<double> delta_p;
  std::optional<double> theta_11;
  std::optional<double> sigma_1;
  std::optional<double> sigma_2;
  std::optional<double> sigma_3;
};

ExponentTable derive_exponents(const ModelParams& params);

// Poisson kernel (s = 1/2): K(x,t) = t^{-N} F(|x|/t), F(r) = C (a^2 + r^2)^{-(N+1)/2}.
struct LinearKernelConstants {
  double a;
  double C;
};
LinearKernelConstants linear_kernel_constants(int N);
double linear_kernel_eval(double r, double t, int N = 1);

double critical_m_ex(int N, double s);

// Mass of F(y) = lambda (R^2 + |y|^2)^{-(N+2s)/2} over R^N.
double huang_mass(double lambda, double R, int N, double s);
double huang_profile_eval(double r, double t, double lambda, double R, const ModelParams& params);

struct HuangCalibrationOptions {
  std::size_t n = 2048;
  double L = 64.0;
  double log_r_min = -6.0;
  double log_r_max = 6.0;
};
struct HuangCalibration {
  double lambda;
  double R;
  double residual;
};
// Relative sup residual of dt u + (-Delta)^s u^m at t = 1 on |x| <= L/2 for the
// profile with mass M and radius R (lambda fixed by the mass).
double huang_residual(double M, double R, const ModelParams& params, const HuangCalibrationOptions& opt = {});
HuangCalibration calibrate_huang(double M, const ModelParams& params, const HuangCalibrationOptions& opt = {});

// Separable solution with U^{1-m} = C (T - t) / |x|^{2s}; zero for t >= T.
double extinction_solution_eval(double r, double t, double C, double T, const ModelParams& params);
double extinction_space_exponent(const ModelParams& params);

struct ExtinctionConstantOptions {
  std::size_t n = 1024;
  double L = 16.0;
  double r_inner = 1.0;
  double r_outer = 8.0;
  double tolerance = 1e-2;
};
struct ExtinctionConstant {
  double C;
  double residual;  // max relative residual on the annulus at the root
};
ExtinctionConstant solve_extinction_constant(const ModelParams& params, const ExtinctionConstantOptions& opt = {});

}  // namespace fraclap
