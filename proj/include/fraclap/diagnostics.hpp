#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fraclap/fft.hpp"
#include "fraclap/grid.hpp"

namespace fraclap {

struct Trajectory;

struct Norms {
  double mass = 0.0;
  double l1 = 0.0;
  double l2 = 0.0;
  double l4 = 0.0;
  double linf = 0.0;
  double min = 0.0;
  double energy = 0.0;  // sum |xi|^{2s} |u_hat|^2, scaled as an integral
};

// `fft` may be supplied to reuse plans; it must match u's grid.
Norms norms(const Field& u, double s, RealFFT* fft = nullptr);
// p = infinity gives the sup norm.
double lp_norm(const Field& u, double p);

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t first = 0;  // inclusive index range into the fitted series
  std::size_t last = 0;
  double residual = 0.0;  // RMS of the regression residuals
  std::size_t points() const { return last - first + 1; }
};

constexpr std::size_t kMinFitPoints = 8;

// Least squares y = slope * x + intercept on [first, last].
FitResult linear_fit(const std::vector<double>& x, const std::vector<double>& y, std::size_t first,
                     std::size_t last);
FitResult linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// Largest index range of at least min_points where the local slope dy/dx
// stays within a relative band of width `variation` around its mean.
std::optional<std::pair<std::size_t, std::size_t>> auto_window(const std::vector<double>& x,
                                                               const std::vector<double>& y,
                                                               double variation = 0.05,
                                                               std::size_t min_points = kMinFitPoints);

// Symmetrized 1-D samples (r, (u(r) + u(-r))/2) for r = x_i >= 0.
struct RadialSamples {
  std::vector<double> r;
  std::vector<double> v;
};
RadialSamples radial_samples(const Field& u);

// Log-log regression of u against |x| on r_lo <= r <= r_hi.
FitResult tail_exponent_fit(const Field& u, double r_lo, double r_hi);
// Same, restricted to the auto-selected window inside [r_lo, r_hi].
FitResult tail_exponent_fit_auto(const Field& u, double r_lo, double r_hi);

// Slope of log q vs log t over [t_lo, t_hi], resampled at log-uniform times.
FitResult decay_rate_fit(const std::vector<double>& t, const std::vector<double>& q, double t_lo, double t_hi,
                         std::size_t samples = 40);
FitResult decay_rate_fit(const Trajectory& traj, double t_lo, double t_hi, std::size_t samples = 40);

// phi_R(x) = phi(x/R), phi = 1 on |x| <= 1 and (1 + (|x|^2 - 1)^4)^{-alpha/8} beyond.
double lemma_weight(double x, double alpha, double R);
// Admissible alpha band N - 2s/(1-m) < alpha < N + 2s/m (no lower bound for m >= 1).
std::pair<double, double> weight_alpha_band(int N, double m, double s);
double weighted_mass(const Field& u, double alpha, double R, double m, double s);

// Rescaled self-profile F(y) = t^alpha u(y t^beta, t) by linear interpolation, zero outside the box.
std::function<double(double)> self_profile(const Field& u, double t, double alpha, double beta);

struct ErrorSeries {
  std::vector<double> t;
  std::vector<double> err;
  // err(last) / err(first) over the series and whether the trend is decreasing
  // (least-squares slope of log err against log t below zero).
  double final_ratio() const;
  bool decreasing() const;
};
// t^alpha sup|u(., t) - t^{-alpha} F(|x| t^{-beta})| for every snapshot with t in [t_lo, t_hi].
ErrorSeries barenblatt_error(const Trajectory& traj, const std::function<double(double)>& F, double alpha,
                             double beta, double t_lo = 0.0,
                             double t_hi = std::numeric_limits<double>::infinity());

struct FrontSeries {
  double level = 0.0;
  std::vector<double> t;
  std::vector<double> radius;
  bool reached_edge = false;  // front came within L/4 of the box edge; series truncated there
};
// R(t) = sup{|x| : u(x, t) >= level} with linear interpolation between nodes.
double front_radius(const Field& u, double level);
FrontSeries front_radius(const Trajectory& traj, double level);
// Fit of log R against t over [t_lo, t_hi].
FitResult front_rate_fit(const FrontSeries& fs, double t_lo, double t_hi);
// Straight-line fit R = a + b t over the same window, residual measured in log space.
FitResult front_linear_fit(const FrontSeries& fs, double t_lo, double t_hi);

std::pair<double, double> extinction_time(const Trajectory& traj);

// max |u| at the nodes with |x| >= L/2 relative to sup |u|.
double box_edge_ratio(const Field& u);

}  // namespace fraclap
