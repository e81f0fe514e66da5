#pragma once

#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fraclap/fracops.hpp"
#include "fraclap/grid.hpp"

namespace fraclap {

enum class NonlinearityKind { power, logarithmic, custom };

// Constitutive function phi with its derivative. Power kind uses the signed
// convention phi(u) = |u|^{m-1} u.
struct Nonlinearity {
  NonlinearityKind kind = NonlinearityKind::power;
  double m = 1.0;
  std::function<double(double)> custom_phi;
  std::function<double(double)> custom_dphi;

  static Nonlinearity power(double m);
  static Nonlinearity logarithmic();
  static Nonlinearity custom(std::function<double(double)> phi, std::function<double(double)> dphi);

  double phi(double u) const;
  double dphi(double u) const;
  bool is_linear() const { return kind == NonlinearityKind::power && m == 1.0; }
  void validate() const;
};

enum class ReactionKind { none, kpp, custom };

struct Reaction {
  ReactionKind kind = ReactionKind::none;
  std::function<double(double)> custom_f;
  double fprime0 = 0.0;

  static Reaction none() { return {}; }
  static Reaction kpp();
  // Checks f(0) = f(1) = 0 and concavity sampled on [0, 1].
  static Reaction custom(std::function<double(double)> f, double fprime0);

  bool active() const { return kind != ReactionKind::none; }
  double eval(double u) const;
};

enum class OperatorKind { spectral, quadrature, semigroup, extension, dirichlet };

struct OperatorSpec {
  OperatorKind kind = OperatorKind::spectral;
  double s = 0.5;
  SemigroupWindow window;
  std::size_t extension_nodes = 0;
  double extension_cap = 0.0;
  std::size_t dirichlet_modes = 0;
};

// Data outside the box for the quadrature operator: phi(u)(x, t) = amplitude(t) * shape(x).
struct ExteriorData {
  std::function<double(double)> shape;
  std::function<double(double)> amplitude;
};

enum class Scheme { explicit_euler, imex_linear, semi_implicit };

struct SolverConfig {
  OperatorSpec op;
  Scheme scheme = Scheme::explicit_euler;
  double c_cfl = 0.2;
  double t_end = 1.0;
  std::vector<double> snapshot_times;
  double blowup_ceiling = 1e12;
  bool dealias = false;
  double dt_max = std::numeric_limits<double>::infinity();
  double dt_min = 1e-14;
  // Semi-implicit scheme: step size follows phi' over points with |u| >= bulk_fraction * sup|u|.
  double bulk_fraction = 1e-3;
  double extinction_threshold = 1e-10;
  std::optional<ExteriorData> exterior;

  void validate() const;
};

struct DiagnosticsRow {
  double t;
  double dt;
  double mass;
  double l2;
  double l4;
  double linf;
  double min;
  double energy;
};

struct Snapshot {
  double t;
  Field u;
};

struct Trajectory {
  std::vector<Snapshot> snapshots;
  std::vector<DiagnosticsRow> diagnostics;
  std::optional<std::pair<double, double>> extinction;
  std::size_t steps = 0;
  std::map<std::string, std::string> meta;
};

using StepCallback = std::function<void(double t, const Field& u)>;

Field step_explicit(const Field& u, double dt, const Nonlinearity& nl, const Reaction& r, const OperatorSpec& op,
                    double c_cfl = 0.2);
Field step_imex_linear(const Field& u, double dt, double s, const Reaction& r = Reaction::none());

Trajectory solve(const Field& u0, const Nonlinearity& nl, const Reaction& r, const SolverConfig& cfg,
                 const StepCallback& on_step = {});

struct DirichletSnapshot {
  double t;
  std::vector<double> u;
  std::vector<double> ratio;  // u t^{1/(m-1)} / Phi_1^{1/m}
};

struct DirichletRow {
  double t;
  double sup;
  double weighted_mass;  // int u Phi_1
};

struct DirichletTrajectory {
  std::vector<double> x;
  std::vector<DirichletSnapshot> snapshots;
  std::vector<DirichletRow> diagnostics;
  std::size_t steps = 0;
};

DirichletTrajectory solve_dirichlet(const std::vector<double>& u0, const Nonlinearity& nl, const SolverConfig& cfg);

// First Dirichlet eigenfunction of (0, pi): sqrt(2/pi) sin x.
double dirichlet_phi1(double x);

std::string to_string(OperatorKind k);
std::string to_string(Scheme s);
OperatorKind operator_kind_from_string(const std::string& s);
Scheme scheme_from_string(const std::string& s);

}  // namespace fraclap
