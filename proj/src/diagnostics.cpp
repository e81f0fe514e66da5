#include "fraclap/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <numeric>
#include <sstream>

#include "fraclap/error.hpp"
#include "fraclap/solver.hpp"

namespace fraclap {

Norms norms(const Field& u, double s, RealFFT* fft) {
  Norms nm;
  if (u.size() == 0) return nm;
  const double dv = u.grid.cell_volume();
  double l1 = 0.0, l2 = 0.0, l4 = 0.0, mass = 0.0;
  nm.min = u[0];
  for (double v : u.values) {
    mass += v;
    const double a = std::abs(v);
    l1 += a;
    l2 += a * a;
    l4 += a * a * a * a;
    nm.linf = std::max(nm.linf, a);
    nm.min = std::min(nm.min, v);
  }
  nm.mass = mass * dv;
  nm.l1 = l1 * dv;
  nm.l2 = std::sqrt(l2 * dv);
  nm.l4 = std::pow(l4 * dv, 0.25);

  std::unique_ptr<RealFFT> own;
  if (!fft) {
    own = std::make_unique<RealFFT>(u.grid);
    fft = own.get();
  }
  std::vector<std::complex<double>> hat(fft->spectral_size());
  fft->forward(u.values.data(), hat.data());
  double e = 0.0;
  for (std::size_t k = 0; k < hat.size(); ++k) {
    const double xi = fft->wavenumber()[k];
    if (xi == 0.0) continue;
    e += fft->multiplicity()[k] * std::pow(xi, 2.0 * s) * std::norm(hat[k]);
  }
  nm.energy = e * dv / static_cast<double>(u.size());
  return nm;
}

double lp_norm(const Field& u, double p) {
  if (!(p >= 1.0)) throw ValidationError("Lp index must be >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : u.values) m = std::max(m, std::abs(v));
    return m;
  }
  double sum = 0.0;
  for (double v : u.values) sum += std::pow(std::abs(v), p);
  return std::pow(sum * u.grid.cell_volume(), 1.0 / p);
}

FitResult linear_fit(const std::vector<double>& x, const std::vector<double>& y, std::size_t first,
                     std::size_t last) {
  if (x.size() != y.size()) throw ValidationError("fit series lengths differ");
  if (last >= x.size() || last < first || last - first + 1 < kMinFitPoints) {
    std::ostringstream os;
    os << "fit window needs at least " << kMinFitPoints << " points";
    throw NumericalError(os.str());
  }
  const double n = static_cast<double>(last - first + 1);
  double sx = 0, sy = 0;
  for (std::size_t i = first; i <= last; ++i) sx += x[i], sy += y[i];
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = first; i <= last; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw NumericalError("fit abscissae are degenerate");
  FitResult f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.first = first;
  f.last = last;
  double ss = 0;
  for (std::size_t i = first; i <= last; ++i) {
    const double d = y[i] - (f.intercept + f.slope * x[i]);
    ss += d * d;
  }
  f.residual = std::sqrt(ss / n);
  if (!std::isfinite(f.residual) || !std::isfinite(f.slope)) throw NumericalError("fit produced non-finite values");
  return f;
}

FitResult linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.empty()) throw NumericalError("empty fit series");
  return linear_fit(x, y, 0, x.size() - 1);
}

std::optional<std::pair<std::size_t, std::size_t>> auto_window(const std::vector<double>& x,
                                                               const std::vector<double>& y, double variation,
                                                               std::size_t min_points) {
  const std::size_t n = x.size();
  if (n < min_points || n < 3) return std::nullopt;
  // Local slopes on each interior node by centered differences.
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = i == 0 ? 0 : i - 1, b = i + 1 == n ? n - 1 : i + 1;
    d[i] = (y[b] - y[a]) / (x[b] - x[a]);
  }
  std::optional<std::pair<std::size_t, std::size_t>> best;
  std::size_t lo = 0;
  for (std::size_t hi = 0; hi < n; ++hi) {
    // Shrink from the left until the window's slope spread is admissible.
    while (lo < hi) {
      auto [mn, mx] = std::minmax_element(d.begin() + lo, d.begin() + hi + 1);
      const double mid = 0.5 * (*mn + *mx);
      if (*mx - *mn <= variation * std::abs(mid)) break;
      ++lo;
    }
    if (hi - lo + 1 >= min_points && (!best || hi - lo > best->second - best->first)) best = std::make_pair(lo, hi);
  }
  return best;
}

RadialSamples radial_samples(const Field& u) {
  if (u.grid.dim != 1) throw ValidationError("radial samples are implemented for 1-D fields");
  const std::size_t n = u.grid.n, c = n / 2;
  RadialSamples rs;
  for (std::size_t i = c; i < n; ++i) {
    const std::size_t j = 2 * c - i;  // mirror node; index n wraps to 0
    rs.r.push_back(u.grid.coord(i));
    rs.v.push_back(0.5 * (u[i] + u[j % n]));
  }
  return rs;
}

namespace {
void log_samples(const Field& u, double r_lo, double r_hi, std::vector<double>& lx, std::vector<double>& ly) {
  if (!(r_lo > 0.0 && r_hi > r_lo && r_hi <= u.grid.L / 2 + 1e-12))
    throw ValidationError("tail window must lie inside (0, L/2]");
  auto rs = radial_samples(u);
  for (std::size_t i = 0; i < rs.r.size(); ++i) {
    if (rs.r[i] < r_lo || rs.r[i] > r_hi) continue;
    if (!(rs.v[i] > 0.0)) throw NumericalError("nonpositive value inside the tail window");
    lx.push_back(std::log(rs.r[i]));
    ly.push_back(std::log(rs.v[i]));
  }
}
}  // namespace

FitResult tail_exponent_fit(const Field& u, double r_lo, double r_hi) {
  std::vector<double> lx, ly;
  log_samples(u, r_lo, r_hi, lx, ly);
  return linear_fit(lx, ly);
}

FitResult tail_exponent_fit_auto(const Field& u, double r_lo, double r_hi) {
  std::vector<double> lx, ly;
  log_samples(u, r_lo, r_hi, lx, ly);
  auto w = auto_window(lx, ly);
  if (!w) throw NumericalError("no tail window with a stable local slope");
  return linear_fit(lx, ly, w->first, w->second);
}

FitResult decay_rate_fit(const std::vector<double>& t, const std::vector<double>& q, double t_lo, double t_hi,
                         std::size_t samples) {
  if (t.size() != q.size()) throw ValidationError("decay series lengths differ");
  if (!(t_lo > 0.0 && t_hi > t_lo)) throw ValidationError("decay window must satisfy 0 < t_lo < t_hi");
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] >= t_lo && t[i] <= t_hi) idx.push_back(i);
  if (idx.empty()) throw NumericalError("decay window is empty");
  // Pick the recorded time nearest each log-uniform target.
  std::vector<double> lx, ly;
  const double a = std::log(t[idx.front()]), b = std::log(t[idx.back()]);
  std::size_t cur = 0, prev = static_cast<std::size_t>(-1);
  for (std::size_t k = 0; k < samples; ++k) {
    const double target = a + (b - a) * static_cast<double>(k) / static_cast<double>(samples - 1);
    while (cur + 1 < idx.size() && std::abs(std::log(t[idx[cur + 1]]) - target) <= std::abs(std::log(t[idx[cur]]) - target))
      ++cur;
    if (cur == prev) continue;
    prev = cur;
    const double v = q[idx[cur]];
    if (!(v > 0.0)) throw NumericalError("nonpositive value in the decay window");
    lx.push_back(std::log(t[idx[cur]]));
    ly.push_back(std::log(v));
  }
  return linear_fit(lx, ly);
}

FitResult decay_rate_fit(const Trajectory& traj, double t_lo, double t_hi, std::size_t samples) {
  std::vector<double> t, q;
  for (const auto& row : traj.diagnostics) {
    t.push_back(row.t);
    q.push_back(row.linf);
  }
  return decay_rate_fit(t, q, t_lo, t_hi, samples);
}

double lemma_weight(double x, double alpha, double R) {
  const double y = std::abs(x) / R;
  if (y <= 1.0) return 1.0;
  const double q = y * y - 1.0;
  return std::pow(1.0 + q * q * q * q, -alpha / 8.0);
}

std::pair<double, double> weight_alpha_band(int N, double m, double s) {
  const double lo = m < 1.0 ? N - 2.0 * s / (1.0 - m) : -std::numeric_limits<double>::infinity();
  return {lo, N + 2.0 * s / m};
}

double weighted_mass(const Field& u, double alpha, double R, double m, double s) {
  if (u.grid.dim != 1) throw ValidationError("weighted mass is implemented for 1-D fields");
  if (!(R > 0.0)) throw ValidationError("weight scale R must be positive");
  auto [lo, hi] = weight_alpha_band(u.grid.dim, m, s);
  if (!(alpha > lo && alpha < hi)) {
    std::ostringstream os;
    os << "weight exponent alpha = " << alpha << " outside the admissible band (" << lo << ", " << hi << ")";
    throw ValidationError(os.str());
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) sum += u[i] * lemma_weight(u.grid.coord(i), alpha, R);
  return sum * u.grid.h();
}

std::function<double(double)> self_profile(const Field& u, double t, double alpha, double beta) {
  if (u.grid.dim != 1) throw ValidationError("self profile is implemented for 1-D fields");
  auto rs = radial_samples(u);
  const double ta = std::pow(t, alpha), tb = std::pow(t, beta);
  const double h = u.grid.h();
  return [rs, ta, tb, h](double y) {
    const double r = std::abs(y) * tb;
    const double pos = r / h;
    const std::size_t i = static_cast<std::size_t>(pos);
    if (i + 1 >= rs.r.size()) return 0.0;
    const double w = pos - static_cast<double>(i);
    return ta * ((1.0 - w) * rs.v[i] + w * rs.v[i + 1]);
  };
}

double ErrorSeries::final_ratio() const {
  if (err.empty() || !(err.front() > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return err.back() / err.front();
}

bool ErrorSeries::decreasing() const {
  if (t.size() < 2) return false;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] > 0.0 && err[i] > 0.0)) return false;
    lx.push_back(std::log(t[i]));
    ly.push_back(std::log(err[i]));
  }
  if (lx.size() < kMinFitPoints) return ly.back() < ly.front();
  return linear_fit(lx, ly).slope < 0.0;
}

ErrorSeries barenblatt_error(const Trajectory& traj, const std::function<double(double)>& F, double alpha,
                             double beta, double t_lo, double t_hi) {
  if (!F) throw ValidationError("reference profile unavailable");
  ErrorSeries es;
  for (const auto& sn : traj.snapshots) {
    if (!(sn.t > 0.0) || sn.t < t_lo || sn.t > t_hi) continue;
    const double ta = std::pow(sn.t, -alpha), tb = std::pow(sn.t, -beta);
    double e = 0.0;
    for (std::size_t i = 0; i < sn.u.size(); ++i) {
      const double x = sn.u.grid.radius(i);
      e = std::max(e, std::abs(sn.u[i] - ta * F(x * tb)));
    }
    es.t.push_back(sn.t);
    es.err.push_back(e / ta);
  }
  return es;
}

double front_radius(const Field& u, double level) {
  if (u.grid.dim != 1) throw ValidationError("front radius is implemented for 1-D fields");
  if (!(level > 0.0 && level < 1.0)) throw ValidationError("front level must lie in (0, 1)");
  auto rs = radial_samples(u);
  for (std::size_t i = rs.r.size(); i-- > 0;) {
    if (rs.v[i] >= level) {
      if (i + 1 == rs.r.size()) return rs.r[i];
      const double w = (rs.v[i] - level) / (rs.v[i] - rs.v[i + 1]);
      return rs.r[i] + w * (rs.r[i + 1] - rs.r[i]);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

FrontSeries front_radius(const Trajectory& traj, double level) {
  FrontSeries fs;
  fs.level = level;
  bool any = false;
  for (const auto& sn : traj.snapshots) {
    const double r = front_radius(sn.u, level);
    if (std::isnan(r)) {
      if (any) throw NumericalError("front level lost after being attained");
      continue;
    }
    any = true;
    if (r > 0.75 * sn.u.grid.L) {
      fs.reached_edge = true;
      break;
    }
    fs.t.push_back(sn.t);
    fs.radius.push_back(r);
  }
  if (!any) throw NumericalError("front level never attained");
  return fs;
}

namespace {
void front_window(const FrontSeries& fs, double t_lo, double t_hi, std::vector<double>& t, std::vector<double>& r) {
  for (std::size_t i = 0; i < fs.t.size(); ++i) {
    if (fs.t[i] < t_lo || fs.t[i] > t_hi) continue;
    if (!(fs.radius[i] > 0.0)) throw NumericalError("nonpositive front radius in window");
    t.push_back(fs.t[i]);
    r.push_back(fs.radius[i]);
  }
}
}  // namespace

FitResult front_rate_fit(const FrontSeries& fs, double t_lo, double t_hi) {
  std::vector<double> t, r;
  front_window(fs, t_lo, t_hi, t, r);
  for (double& v : r) v = std::log(v);
  return linear_fit(t, r);
}

FitResult front_linear_fit(const FrontSeries& fs, double t_lo, double t_hi) {
  std::vector<double> t, r;
  front_window(fs, t_lo, t_hi, t, r);
  auto f = linear_fit(t, r);
  double ss = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double pred = f.intercept + f.slope * t[i];
    const double d = pred > 0.0 ? std::log(r[i]) - std::log(pred) : std::numeric_limits<double>::infinity();
    ss += d * d;
  }
  f.residual = std::sqrt(ss / static_cast<double>(t.size()));
  return f;
}

std::pair<double, double> extinction_time(const Trajectory& traj) {
  if (!traj.extinction) throw NumericalError("run did not extinguish");
  return *traj.extinction;
}

double box_edge_ratio(const Field& u) {
  double sup = 0.0, edge = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = std::abs(u[i]);
    sup = std::max(sup, a);
    if (u.grid.radius(i) >= u.grid.L / 2) edge = std::max(edge, a);
  }
  return sup > 0.0 ? edge / sup : 0.0;
}

}  // namespace fraclap
