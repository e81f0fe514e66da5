#pragma once

#include <cstdint>
#include <limits>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fraclap/exponents.hpp"
#include "fraclap/grid.hpp"
#include "fraclap/solver.hpp"

namespace fraclap {

// Declarative initial data.
//   gaussian          mass, width, center
//   indicator         radius, height, center
//   explicit-profile  profile in {linear-kernel, huang, extinction} with numeric params
//   custom-table      path to a two-column CSV (x, value), linearly interpolated, zero outside
//   random-bumps      count bumps drawn from the run seed
struct InitialDataRecipe {
  std::string kind = "gaussian";
  double mass = 1.0;
  double width = 1.0;
  double center = 0.0;
  double radius = 1.0;
  double height = 1.0;
  std::string profile;
  std::map<std::string, double> params;
  std::string path;
  int count = 3;

  // Compares only the fields the kind uses.
  bool operator==(const InitialDataRecipe& o) const;
};

struct SnapshotPlan {
  std::string spacing = "log";  // "log", "linear" or "list"
  double from = 0.0;
  double to = 0.0;  // 0 means t_end
  int count = 0;
  std::vector<double> times;

  std::vector<double> resolve(double t_end) const;
  bool operator==(const SnapshotPlan& o) const;
};

struct AnalysisSpec {
  // Sup-norm decay fit window; empty means [t_end / 10, t_end].
  std::optional<std::pair<double, double>> decay_window;
  double front_level = 0.5;
  double tolerance = 0.1;       // relative, for the decay slope verdict
  double rate_tolerance = 0.2;  // relative, for front rates against sigma_1 / sigma_2

  bool operator==(const AnalysisSpec&) const = default;
};

struct OperatorPair {
  std::string reference = "spectral";
  std::string candidate = "quadrature";
  double s = 0.5;
  double tolerance = 1e-2;

  bool operator==(const OperatorPair&) const = default;
};

struct OperatorCheckSpec {
  std::vector<std::string> fields = {"gaussian"};  // "gaussian", "modulated"
  double inner_fraction = 0.5;
  std::vector<OperatorPair> pairs;

  bool operator==(const OperatorCheckSpec&) const = default;
};

struct OutputSpec {
  bool snapshots_csv = true;
  bool snapshots_raw = true;

  bool operator==(const OutputSpec&) const = default;
};

struct RunConfig {
  std::string id = "run";
  // For the Dirichlet operator only grid.n is used (number of interior nodes, any n >= 8).
  GridSpec grid{1, 1024, 16.0};
  double m = 1.0;
  double s = 0.5;
  std::string nonlinearity = "power";  // "power" or "logarithmic"
  std::string reaction = "none";       // "none" or "kpp"
  std::string op = "spectral";
  SemigroupWindow window;
  std::size_t extension_nodes = 0;
  double extension_cap = 0.0;
  std::size_t dirichlet_modes = 0;
  std::string exterior = "zero";  // "zero" or "profile" (quadrature only)
  std::string scheme = "explicit";
  double t_end = 1.0;
  double c_cfl = 0.2;
  double dt_max = std::numeric_limits<double>::infinity();
  double dt_min = 1e-14;
  double blowup_ceiling = 1e12;
  double extinction_threshold = 1e-10;
  double bulk_fraction = 1e-3;
  bool dealias = false;
  SnapshotPlan snapshots;
  InitialDataRecipe initial;
  std::uint64_t seed = 0;
  AnalysisSpec analysis;
  OutputSpec outputs;
  std::optional<OperatorCheckSpec> operator_check;
  // Directory against which relative paths in the recipe resolve; not serialized.
  std::filesystem::path base_dir;

  bool operator==(const RunConfig& o) const;

  ModelParams model() const;
  Nonlinearity make_nonlinearity() const;
  Reaction make_reaction() const;
  SolverConfig solver_config() const;
  // Throws ValidationError for out-of-band or inconsistent settings.
  void validate() const;
};

RunConfig parse_config(const nlohmann::json& j);
nlohmann::json emit_config(const RunConfig& c);
RunConfig load_config(const std::filesystem::path& path);

// Separable-solution constant for the extinction profile: params["C"] if given, else calibrated.
double extinction_constant_for(const RunConfig& c);

// Samples the recipe on the periodic grid. Needs the full config for the model
// (explicit profiles) and the seed.
Field initial_field(const RunConfig& c);
// Same on the Dirichlet nodes of (0, pi).
std::vector<double> initial_dirichlet(const RunConfig& c);

}  // namespace fraclap
