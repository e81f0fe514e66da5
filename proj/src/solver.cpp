#include "fraclap/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fraclap/diagnostics.hpp"
#include "fraclap/error.hpp"

namespace fraclap {

namespace {
constexpr double kPhiFloor = 1e-30;
}

Nonlinearity Nonlinearity::power(double m) {
  Nonlinearity nl;
  nl.kind = NonlinearityKind::power;
  nl.m = m;
  nl.validate();
  return nl;
}

Nonlinearity Nonlinearity::logarithmic() {
  Nonlinearity nl;
  nl.kind = NonlinearityKind::logarithmic;
  return nl;
}

Nonlinearity Nonlinearity::custom(std::function<double(double)> phi, std::function<double(double)> dphi) {
  Nonlinearity nl;
  nl.kind = NonlinearityKind::custom;
  nl.custom_phi = std::move(phi);
  nl.custom_dphi = std::move(dphi);
  nl.validate();
  return nl;
}

double Nonlinearity::phi(double u) const {
  switch (kind) {
    case NonlinearityKind::power:
      if (m == 1.0) return u;
      return u == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(u), m), u);
    case NonlinearityKind::logarithmic:
      return std::log1p(u);
    case NonlinearityKind::custom:
      return custom_phi(u);
  }
  return 0.0;
}

double Nonlinearity::dphi(double u) const {
  switch (kind) {
    case NonlinearityKind::power:
      if (m == 1.0) return 1.0;
      return m * std::pow(std::max(std::abs(u), kPhiFloor), m - 1.0);
    case NonlinearityKind::logarithmic:
      return 1.0 / (1.0 + u);
    case NonlinearityKind::custom:
      return custom_dphi(u);
  }
  return 0.0;
}

void Nonlinearity::validate() const {
  switch (kind) {
    case NonlinearityKind::power:
      if (!(m > 0.0) || !std::isfinite(m)) throw ValidationError("power nonlinearity needs m > 0");
      break;
    case NonlinearityKind::logarithmic:
      break;
    case NonlinearityKind::custom:
      if (!custom_phi || !custom_dphi) throw ValidationError("custom nonlinearity needs phi and phi'");
      if (std::abs(custom_phi(0.0)) > 1e-14) throw ValidationError("custom nonlinearity must satisfy phi(0) = 0");
      break;
  }
}

Reaction Reaction::kpp() {
  Reaction r;
  r.kind = ReactionKind::kpp;
  r.fprime0 = 1.0;
  return r;
}

Reaction Reaction::custom(std::function<double(double)> f, double fprime0) {
  if (!f) throw ValidationError("custom reaction needs an evaluator");
  if (std::abs(f(0.0)) > 1e-12 || std::abs(f(1.0)) > 1e-12)
    throw ValidationError("custom reaction must vanish at 0 and 1");
  const int k = 64;
  for (int i = 1; i < k; ++i) {
    const double h = 1.0 / k, u = i * h;
    if (f(u + h) - 2.0 * f(u) + f(u - h) > 1e-12) throw ValidationError("custom reaction must be concave on [0, 1]");
  }
  if (!(fprime0 > 0.0)) throw ValidationError("reaction slope f'(0) must be positive");
  Reaction r;
  r.kind = ReactionKind::custom;
  r.custom_f = std::move(f);
  r.fprime0 = fprime0;
  return r;
}

double Reaction::eval(double u) const {
  switch (kind) {
    case ReactionKind::none:
      return 0.0;
    case ReactionKind::kpp:
      return u * (1.0 - u);
    case ReactionKind::custom:
      return custom_f(u);
  }
  return 0.0;
}

void SolverConfig::validate() const {
  if (!(c_cfl > 0.0 && c_cfl < 1.0)) throw ValidationError("cfl constant must lie in (0, 1)");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ValidationError("t_end must be positive");
  if (!(blowup_ceiling > 0.0)) throw ValidationError("blow-up ceiling must be positive");
  if (!(dt_max > 0.0)) throw ValidationError("dt_max must be positive");
  if (!(dt_min > 0.0)) throw ValidationError("dt_min must be positive");
  if (!(bulk_fraction >= 0.0 && bulk_fraction < 1.0)) throw ValidationError("bulk fraction must lie in [0, 1)");
  double prev = -1.0;
  for (double t : snapshot_times) {
    if (!(t > prev) || t < 0.0) throw ValidationError("snapshot times must be nonnegative and strictly increasing");
    prev = t;
  }
  if (op.kind != OperatorKind::dirichlet) (void)FracOrder(op.s);
  else if (!(op.s > 0.0 && op.s < 1.0)) throw ValidationError("fractional order s must lie in (0, 1)");
  if (exterior && op.kind != OperatorKind::quadrature)
    throw ValidationError("exterior data requires the quadrature operator");
  if (exterior && (!exterior->shape || !exterior->amplitude)) throw ValidationError("exterior data is incomplete");
  if (scheme == Scheme::imex_linear && op.kind != OperatorKind::spectral)
    throw ValidationError("imex-linear scheme requires the spectral operator");
}

namespace {

// The discrete operator behind a run on the periodic box.
class BoxOperator {
 public:
  BoxOperator(const GridSpec& g, const SolverConfig& cfg) : s_(cfg.op.s), dealias_(cfg.dealias) {
    const FracOrder order(cfg.op.s);
    switch (cfg.op.kind) {
      case OperatorKind::spectral:
        sym_ = std::make_unique<SymbolOperator>(SymbolOperator::spectral(g, s_));
        break;
      case OperatorKind::semigroup: {
        RealFFT probe(g);
        sym_ = std::make_unique<SymbolOperator>(g, semigroup_multiplier(probe.wavenumber(), s_, cfg.op.window));
        break;
      }
      case OperatorKind::extension: {
        RealFFT probe(g);
        auto mesh = make_extension_mesh(g, order, cfg.op.extension_nodes, cfg.op.extension_cap);
        mesh.validate(g.h());
        auto mult = extension_multiplier(probe.wavenumber(), s_, mesh);
        sym_ = std::make_unique<SymbolOperator>(g, std::move(mult));
        break;
      }
      case OperatorKind::quadrature:
        quad_ = std::make_unique<QuadratureOperator>(g, order);
        if (cfg.exterior) {
          ext_shape_ = quad_->exterior_contribution(cfg.exterior->shape);
          amplitude_ = cfg.exterior->amplitude;
          ext_.resize(g.size());
        }
        if (dealias_) throw ValidationError("dealiasing applies to Fourier-symbol operators only");
        break;
      case OperatorKind::dirichlet:
        throw ValidationError("the Dirichlet operator is driven by solve_dirichlet");
    }
  }

  void apply(const double* phi, double* out, double t) {
    if (sym_) {
      if (dealias_) sym_->apply_dealiased(phi, out);
      else sym_->apply(phi, out);
      return;
    }
    if (!ext_shape_.empty()) {
      const double a = amplitude_(t);
      for (std::size_t i = 0; i < ext_.size(); ++i) ext_[i] = a * ext_shape_[i];
      quad_->apply(phi, out, ext_.data());
    } else {
      quad_->apply(phi, out);
    }
  }

  double diagonal() const { return sym_ ? sym_->diagonal() : quad_->diagonal(); }
  bool spectral() const { return sym_ != nullptr; }
  SymbolOperator* symbol() { return sym_.get(); }

 private:
  double s_;
  bool dealias_;
  std::unique_ptr<SymbolOperator> sym_;
  std::unique_ptr<QuadratureOperator> quad_;
  std::vector<double> ext_shape_;
  std::vector<double> ext_;
  std::function<double(double)> amplitude_;
};

double sup_abs(const std::vector<double>& u) {
  double m = 0.0;
  for (double v : u) m = std::max(m, std::abs(v));
  return m;
}

void check_state(const std::vector<double>& u, double ceiling, double t) {
  for (double v : u) {
    if (!std::isfinite(v) || std::abs(v) > ceiling) {
      std::ostringstream os;
      os << "blow-up guard tripped at t = " << t << " (value " << v << ")";
      throw BlowUpError(os.str());
    }
  }
}

void check_domain(const Nonlinearity& nl, const std::vector<double>& u) {
  if (nl.kind == NonlinearityKind::logarithmic) {
    for (double v : u)
      if (!(v > -1.0)) throw NumericalError("state left the domain u > -1 of the logarithmic nonlinearity");
  }
  if (nl.kind == NonlinearityKind::custom && !u.empty()) {
    auto [lo, hi] = std::minmax_element(u.begin(), u.end());
    const int k = 16;
    for (int i = 0; i <= k; ++i) {
      const double v = *lo + (*hi - *lo) * i / k;
      if (!(nl.dphi(v) > 0.0)) throw NumericalError("custom nonlinearity is not increasing on the state's range");
    }
  }
}

// Largest phi' over the bulk |u| >= frac * sup|u| (frac = 0 takes all points).
double max_dphi(const Nonlinearity& nl, const std::vector<double>& u, double frac) {
  const double cut = frac * sup_abs(u);
  double d = 0.0;
  for (double v : u)
    if (std::abs(v) >= cut) d = std::max(d, nl.dphi(v));
  return d;
}

double reaction_slope_bound(const Reaction& r) {
  if (!r.active()) return 0.0;
  return std::max(1.0, r.fprime0);
}

// Solves v + k phi(v) = c for the scalar v; the left side is increasing in v.
// For concave phi (power m < 1, logarithmic) the unknown is w = phi(v), which
// makes the residual convex for c > 0 and concave for c < 0; Newton started at
// the matching bracket end then converges monotonically. `guess` seeds the
// custom case.
double solve_pointwise(const Nonlinearity& nl, double k, double c, double guess) {
  if (c == 0.0) return 0.0;
  double lo = std::min(c, 0.0), hi = std::max(c, 0.0);
  if (nl.kind == NonlinearityKind::logarithmic) lo = std::max(lo, -1.0 + 1e-15);
  if (lo + k * nl.phi(lo) - c > 0.0) return lo;

  const bool in_phi = nl.kind == NonlinearityKind::logarithmic || (nl.kind == NonlinearityKind::power && nl.m < 1.0);
  std::function<double(double)> to_v = [](double w) { return w; };
  std::function<double(double)> dv = [](double) { return 1.0; };
  double wl = lo, wh = hi;
  if (in_phi) {
    wl = nl.phi(lo);
    wh = nl.phi(hi);
    if (nl.kind == NonlinearityKind::logarithmic) {
      to_v = [](double w) { return std::expm1(w); };
      dv = [](double w) { return std::exp(w); };
    } else {
      const double p = 1.0 / nl.m;
      to_v = [p](double w) { return std::copysign(std::pow(std::abs(w), p), w); };
      dv = [p](double w) { return p * std::pow(std::abs(w), p - 1.0); };
    }
  }
  auto G = [&](double w) { return to_v(w) + k * (in_phi ? w : nl.phi(w)) - c; };
  auto dG = [&](double w) { return dv(w) + k * (in_phi ? 1.0 : nl.dphi(w)); };

  double w;
  if (nl.kind == NonlinearityKind::custom) w = guess > wl && guess < wh ? guess : 0.5 * (wl + wh);
  else if (nl.kind == NonlinearityKind::logarithmic || c > 0.0) w = wh;
  else w = wl;
  for (int it = 0; it < 200; ++it) {
    const double gw = G(w);
    if (gw > 0.0) wh = w;
    else wl = w;
    double next = w - gw / dG(w);
    if (!(next >= wl && next <= wh)) next = 0.5 * (wl + wh);
    if (std::abs(next - w) <= 1e-15 * std::max(std::abs(next), 1e-300) || wh - wl <= 1e-16 * std::abs(wh)) {
      w = next;
      break;
    }
    w = next;
  }
  return in_phi ? to_v(w) : w;
}

DiagnosticsRow measure(const Field& u, double t, double dt, double s, RealFFT& fft) {
  auto nm = norms(u, s, &fft);
  return {t, dt, nm.mass, nm.l2, nm.l4, nm.linf, nm.min, nm.energy};
}

}  // namespace

Field step_explicit(const Field& u, double dt, const Nonlinearity& nl, const Reaction& r, const OperatorSpec& op,
                    double c_cfl) {
  u.validate();
  nl.validate();
  if (!(dt > 0.0)) throw ValidationError("time step must be positive");
  const double h = u.grid.h();
  const double dmax = max_dphi(nl, u.values, 0.0);
  const double limit = c_cfl * std::pow(h, 2.0 * op.s) / std::max(dmax, 1e-300);
  if (dt > limit * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "CFL violation: dt = " << dt << " exceeds " << limit;
    throw ValidationError(os.str());
  }
  check_domain(nl, u.values);
  SolverConfig cfg;
  cfg.op = op;
  BoxOperator A(u.grid, cfg);
  std::vector<double> phi(u.size()), lap(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) phi[i] = nl.phi(u[i]);
  A.apply(phi.data(), lap.data(), 0.0);
  Field out(u.grid);
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] - dt * lap[i] + dt * r.eval(u[i]);
  for (double v : out.values)
    if (!std::isfinite(v)) throw BlowUpError("non-finite value after explicit step");
  return out;
}

Field step_imex_linear(const Field& u, double dt, double s, const Reaction& r) {
  u.validate();
  if (!(dt > 0.0)) throw ValidationError("time step must be positive");
  auto op = SymbolOperator::spectral(u.grid, s);
  auto& fft = op.fft();
  std::vector<double> rhs(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) rhs[i] = u[i] + dt * r.eval(u[i]);
  std::vector<std::complex<double>> hat(fft.spectral_size());
  fft.forward(rhs.data(), hat.data());
  for (std::size_t k = 0; k < hat.size(); ++k) hat[k] /= 1.0 + dt * op.symbol()[k];
  Field out(u.grid);
  fft.inverse(hat.data(), out.values.data());
  return out;
}

Trajectory solve(const Field& u0, const Nonlinearity& nl, const Reaction& r, const SolverConfig& cfg,
                 const StepCallback& on_step) {
  cfg.validate();
  nl.validate();
  u0.validate();
  if (cfg.scheme == Scheme::imex_linear && !nl.is_linear())
    throw ValidationError("imex-linear scheme requires the linear nonlinearity phi(u) = u");
  const GridSpec& g = u0.grid;
  BoxOperator A(g, cfg);
  RealFFT fft(g);
  const double s = cfg.op.s;
  const double h2s = std::pow(g.h(), 2.0 * s);
  const double a0 = A.diagonal();
  const double rslope = reaction_slope_bound(r);

  Trajectory tr;
  tr.meta["operator"] = to_string(cfg.op.kind);
  tr.meta["scheme"] = to_string(cfg.scheme);
  tr.meta["dealias"] = cfg.dealias ? "on" : "off";
  tr.meta["exterior_data"] = cfg.exterior ? "on" : "off";

  std::vector<double> targets = cfg.snapshot_times;
  std::erase_if(targets, [&](double t) { return t > cfg.t_end; });
  if (targets.empty() || targets.back() < cfg.t_end) targets.push_back(cfg.t_end);
  std::size_t next = 0;

  Field u = u0;
  double t = 0.0;
  tr.snapshots.push_back({0.0, u});
  if (!targets.empty() && targets.front() == 0.0) ++next;
  tr.diagnostics.push_back(measure(u, 0.0, 0.0, s, fft));
  if (on_step) on_step(0.0, u);

  if (sup_abs(u.values) < cfg.extinction_threshold) {
    tr.extinction = std::make_pair(0.0, 0.0);
    return tr;
  }

  std::vector<double> phi(u.size()), lap(u.size());
  std::vector<std::complex<double>> hat;
  while (next < targets.size()) {
    check_domain(nl, u.values);
    const double target = targets[next];
    double dt_stable;
    switch (cfg.scheme) {
      case Scheme::explicit_euler:
        dt_stable = cfg.c_cfl * h2s / std::max(max_dphi(nl, u.values, 0.0), 1e-300);
        break;
      case Scheme::semi_implicit:
        dt_stable = cfg.c_cfl * h2s / std::max(max_dphi(nl, u.values, cfg.bulk_fraction), 1e-300);
        break;
      case Scheme::imex_linear:
        dt_stable = std::isfinite(cfg.dt_max) ? cfg.dt_max : cfg.c_cfl * h2s * 10.0;
        break;
    }
    if (rslope > 0.0) dt_stable = std::min(dt_stable, cfg.c_cfl / rslope);
    dt_stable = std::min(dt_stable, cfg.dt_max);
    if (dt_stable < cfg.dt_min) {
      std::ostringstream os;
      os << "CFL deadlock at t = " << t << ": stable step " << dt_stable << " below " << cfg.dt_min;
      throw CflDeadlockError(os.str());
    }
    double dt = dt_stable;
    bool hit = false;
    if (t + dt >= target - 1e-12 * std::max(1.0, target)) {
      dt = target - t;
      hit = true;
    }

    for (std::size_t i = 0; i < u.size(); ++i) phi[i] = nl.phi(u[i]);
    switch (cfg.scheme) {
      case Scheme::explicit_euler:
        A.apply(phi.data(), lap.data(), t);
        for (std::size_t i = 0; i < u.size(); ++i) u[i] += dt * (r.eval(u[i]) - lap[i]);
        break;
      case Scheme::semi_implicit:
        A.apply(phi.data(), lap.data(), t);
        for (std::size_t i = 0; i < u.size(); ++i) {
          const double c = u[i] - dt * (lap[i] - a0 * phi[i]) + dt * r.eval(u[i]);
          u[i] = solve_pointwise(nl, dt * a0, c, u[i]);
        }
        break;
      case Scheme::imex_linear: {
        auto& f = A.symbol()->fft();
        hat.resize(f.spectral_size());
        for (std::size_t i = 0; i < u.size(); ++i) lap[i] = u[i] + dt * r.eval(u[i]);
        f.forward(lap.data(), hat.data());
        const auto& sym = A.symbol()->symbol();
        for (std::size_t k = 0; k < hat.size(); ++k) hat[k] /= 1.0 + dt * sym[k];
        f.inverse(hat.data(), u.values.data());
        break;
      }
    }
    const double t_prev = t;
    t = hit ? target : t + dt;
    ++tr.steps;
    check_state(u.values, cfg.blowup_ceiling, t);
    tr.diagnostics.push_back(measure(u, t, dt, s, fft));
    if (on_step) on_step(t, u);
    if (hit) {
      tr.snapshots.push_back({t, u});
      ++next;
    }
    if (sup_abs(u.values) < cfg.extinction_threshold) {
      tr.extinction = std::make_pair(t_prev, t);
      if (!hit) tr.snapshots.push_back({t, u});
      break;
    }
  }
  return tr;
}

double dirichlet_phi1(double x) { return std::sqrt(2.0 / std::numbers::pi) * std::sin(x); }

DirichletTrajectory solve_dirichlet(const std::vector<double>& u0, const Nonlinearity& nl, const SolverConfig& cfg) {
  cfg.validate();
  if (cfg.op.kind != OperatorKind::dirichlet) throw ValidationError("solve_dirichlet requires the Dirichlet operator");
  if (nl.kind != NonlinearityKind::power || !(nl.m > 1.0))
    throw ValidationError("solve_dirichlet requires a power nonlinearity with m > 1");
  const std::size_t n = u0.size();
  if (n < 8) throw ValidationError("Dirichlet grid needs at least 8 points");
  for (double v : u0)
    if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("Dirichlet data must be finite and nonnegative");

  DirichletOperator A(n, cfg.op.s, cfg.op.dirichlet_modes);
  const double h = std::numbers::pi / static_cast<double>(n + 1);
  const double h2s = std::pow(h, 2.0 * cfg.op.s);
  const double m = nl.m;

  DirichletTrajectory tr;
  tr.x = dirichlet_nodes(n);
  std::vector<double> phi1(n), phi1m(n);
  for (std::size_t j = 0; j < n; ++j) {
    phi1[j] = dirichlet_phi1(tr.x[j]);
    phi1m[j] = std::pow(phi1[j], 1.0 / m);
  }
  auto record_row = [&](double t, const std::vector<double>& u) {
    double wm = 0.0;
    for (std::size_t j = 0; j < n; ++j) wm += u[j] * phi1[j];
    tr.diagnostics.push_back({t, sup_abs(u), wm * h});
  };
  auto record_snap = [&](double t, const std::vector<double>& u) {
    DirichletSnapshot sn{t, u, std::vector<double>(n)};
    const double tf = t > 0.0 ? std::pow(t, 1.0 / (m - 1.0)) : 1.0;
    for (std::size_t j = 0; j < n; ++j) sn.ratio[j] = u[j] * tf / phi1m[j];
    tr.snapshots.push_back(std::move(sn));
  };

  std::vector<double> targets = cfg.snapshot_times;
  std::erase_if(targets, [&](double t) { return t > cfg.t_end || t <= 0.0; });
  if (targets.empty() || targets.back() < cfg.t_end) targets.push_back(cfg.t_end);

  std::vector<double> u = u0, phi(n), lap(n);
  double t = 0.0;
  record_row(0.0, u);
  record_snap(0.0, u);
  std::size_t next = 0;
  while (next < targets.size()) {
    const double target = targets[next];
    double dmax = 0.0;
    for (double v : u) dmax = std::max(dmax, nl.dphi(v));
    double dt = std::min(cfg.c_cfl * h2s / std::max(dmax, 1e-300), cfg.dt_max);
    if (dt < cfg.dt_min) throw CflDeadlockError("CFL deadlock in Dirichlet run");
    bool hit = false;
    if (t + dt >= target - 1e-12 * std::max(1.0, target)) {
      dt = target - t;
      hit = true;
    }
    for (std::size_t j = 0; j < n; ++j) phi[j] = nl.phi(u[j]);
    A.apply(phi.data(), lap.data());
    for (std::size_t j = 0; j < n; ++j) u[j] -= dt * lap[j];
    t = hit ? target : t + dt;
    ++tr.steps;
    check_state(u, cfg.blowup_ceiling, t);
    record_row(t, u);
    if (hit) {
      record_snap(t, u);
      ++next;
    }
  }
  return tr;
}

std::string to_string(OperatorKind k) {
  switch (k) {
    case OperatorKind::spectral: return "spectral";
    case OperatorKind::quadrature: return "quadrature";
    case OperatorKind::semigroup: return "semigroup";
    case OperatorKind::extension: return "extension";
    case OperatorKind::dirichlet: return "dirichlet";
  }
  return "?";
}

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::explicit_euler: return "explicit";
    case Scheme::imex_linear: return "imex-linear";
    case Scheme::semi_implicit: return "semi-implicit";
  }
  return "?";
}

OperatorKind operator_kind_from_string(const std::string& s) {
  for (auto k : {OperatorKind::spectral, OperatorKind::quadrature, OperatorKind::semigroup, OperatorKind::extension,
                 OperatorKind::dirichlet})
    if (to_string(k) == s) return k;
  throw ValidationError("unknown operator kind '" + s + "'");
}

Scheme scheme_from_string(const std::string& s) {
  for (auto k : {Scheme::explicit_euler, Scheme::imex_linear, Scheme::semi_implicit})
    if (to_string(k) == s) return k;
  throw ValidationError("unknown scheme '" + s + "'");
}

}  // namespace fraclap
