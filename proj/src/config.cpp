#include "fraclap/config.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "fraclap/error.hpp"
#include "fraclap/experiments.hpp"
#include "fraclap/fracops.hpp"
#include "fraclap/io.hpp"

namespace fraclap {

using nlohmann::json;

namespace {

// Reads keys of one JSON object and rejects the ones nobody asked for.
class Section {
 public:
  Section(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ValidationError(where_ + ": expected an object");
  }
  ~Section() noexcept(false) {
    if (std::uncaught_exceptions()) return;
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw ValidationError(where_ + ": unknown key '" + k + "'");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }
  const json& at(const std::string& key) {
    if (!has(key)) throw ValidationError(where_ + ": missing key '" + key + "'");
    return j_.at(key);
  }
  template <class T>
  void get(const std::string& key, T& out) {
    if (!has(key)) return;
    out = as<T>(j_.at(key), key);
  }
  // null reads as +infinity.
  void get_bound(const std::string& key, double& out) {
    if (!has(key)) return;
    out = j_.at(key).is_null() ? std::numeric_limits<double>::infinity() : as<double>(j_.at(key), key);
  }
  std::string where(const std::string& key) const { return where_ + "." + key; }

 private:
  template <class T>
  T as(const json& v, const std::string& key) const {
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw ValidationError(where(key) + ": expected a number");
      } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
        if (!v.is_number_integer()) throw ValidationError(where(key) + ": expected an integer");
        if (std::is_unsigned_v<T> && v.get<long long>() < 0 && !v.is_number_unsigned())
          throw ValidationError(where(key) + ": expected a nonnegative integer");
      }
      return v.get<T>();
    } catch (const json::exception& e) {
      throw ValidationError(where(key) + ": " + e.what());
    }
  }

  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

json bound(double v) { return std::isinf(v) ? json(nullptr) : json(v); }

bool uses(const InitialDataRecipe& r, const char* field) {
  static const std::map<std::string, std::set<std::string>> table = {
      {"gaussian", {"mass", "width", "center"}},
      {"indicator", {"radius", "height", "center"}},
      {"explicit-profile", {"profile", "params"}},
      {"custom-table", {"path"}},
      {"random-bumps", {"count"}}};
  auto it = table.find(r.kind);
  return it != table.end() && it->second.count(field);
}

const std::set<std::string>& profile_names() {
  static const std::set<std::string> names = {"linear-kernel", "huang", "extinction"};
  return names;
}

double param(const InitialDataRecipe& r, const std::string& key, double fallback) {
  auto it = r.params.find(key);
  return it == r.params.end() ? fallback : it->second;
}

void check_kind(const std::string& v, std::initializer_list<const char*> allowed, const std::string& what) {
  for (const char* a : allowed)
    if (v == a) return;
  throw ValidationError("unknown " + what + " '" + v + "'");
}

InitialDataRecipe parse_recipe(const json& j) {
  Section sec(j, "initial_data");
  InitialDataRecipe r;
  r.kind = sec.at("kind").get<std::string>();
  check_kind(r.kind, {"gaussian", "indicator", "explicit-profile", "custom-table", "random-bumps"},
             "initial-data kind");
  if (uses(r, "mass")) sec.get("mass", r.mass);
  if (uses(r, "width")) sec.get("width", r.width);
  if (uses(r, "center")) sec.get("center", r.center);
  if (uses(r, "radius")) sec.get("radius", r.radius);
  if (uses(r, "height")) sec.get("height", r.height);
  if (uses(r, "profile")) r.profile = sec.at("profile").get<std::string>();
  if (uses(r, "params") && sec.has("params")) {
    Section p(j.at("params"), "initial_data.params");
    for (const auto& [k, v] : j.at("params").items()) {
      double x = 0.0;
      p.get(k, x);
      r.params[k] = x;
    }
  }
  if (uses(r, "path")) r.path = sec.at("path").get<std::string>();
  if (uses(r, "count")) sec.get("count", r.count);
  return r;
}

json emit_recipe(const InitialDataRecipe& r) {
  json j{{"kind", r.kind}};
  if (uses(r, "mass")) j["mass"] = r.mass;
  if (uses(r, "width")) j["width"] = r.width;
  if (uses(r, "center")) j["center"] = r.center;
  if (uses(r, "radius")) j["radius"] = r.radius;
  if (uses(r, "height")) j["height"] = r.height;
  if (uses(r, "profile")) {
    j["profile"] = r.profile;
    j["params"] = json::object();
    for (const auto& [k, v] : r.params) j["params"][k] = v;
  }
  if (uses(r, "path")) j["path"] = r.path;
  if (uses(r, "count")) j["count"] = r.count;
  return j;
}

SnapshotPlan parse_snapshots(const json& j) {
  Section sec(j, "schedule.snapshots");
  SnapshotPlan p;
  sec.get("spacing", p.spacing);
  check_kind(p.spacing, {"log", "linear", "list"}, "snapshot spacing");
  if (p.spacing == "list") {
    sec.get("times", p.times);
  } else {
    sec.get("from", p.from);
    sec.get("to", p.to);
    sec.get("count", p.count);
  }
  return p;
}

json emit_snapshots(const SnapshotPlan& p) {
  if (p.spacing == "list") return json{{"spacing", "list"}, {"times", p.times}};
  return json{{"spacing", p.spacing}, {"from", p.from}, {"to", p.to}, {"count", p.count}};
}

OperatorCheckSpec parse_check(const json& j) {
  Section sec(j, "operator_check");
  OperatorCheckSpec c;
  sec.get("fields", c.fields);
  sec.get("inner_fraction", c.inner_fraction);
  for (const auto& pj : sec.at("pairs")) {
    Section ps(pj, "operator_check.pairs[]");
    OperatorPair p;
    ps.get("reference", p.reference);
    ps.get("candidate", p.candidate);
    ps.get("s", p.s);
    ps.get("tolerance", p.tolerance);
    c.pairs.push_back(p);
  }
  return c;
}

json emit_check(const OperatorCheckSpec& c) {
  json pairs = json::array();
  for (const auto& p : c.pairs)
    pairs.push_back({{"reference", p.reference}, {"candidate", p.candidate}, {"s", p.s}, {"tolerance", p.tolerance}});
  return json{{"fields", c.fields}, {"inner_fraction", c.inner_fraction}, {"pairs", pairs}};
}

double bump_shape(double d) { return d < 1.0 ? (1.0 - d * d) * (1.0 - d * d) : 0.0; }

// Radial profile of the recipe at distance r (or signed coordinate x in 1-D).
std::function<double(double)> recipe_profile(const RunConfig& c) {
  const auto& r = c.initial;
  const int N = c.op == "dirichlet" ? 1 : c.grid.dim;
  if (r.kind == "gaussian") {
    const double norm = r.mass / std::pow(r.width * std::sqrt(2.0 * std::numbers::pi), N);
    return [norm, w = r.width, x0 = r.center](double x) { return norm * std::exp(-(x - x0) * (x - x0) / (2 * w * w)); };
  }
  if (r.kind == "indicator")
    return [rad = r.radius, hgt = r.height, x0 = r.center](double x) { return std::abs(x - x0) <= rad ? hgt : 0.0; };
  if (r.kind == "custom-table") {
    auto path = std::filesystem::path(r.path);
    if (path.is_relative()) path = c.base_dir / path;
    auto rows = io::read_table_csv(path);
    std::sort(rows.begin(), rows.end());
    return [rows](double x) {
      if (x < rows.front().first || x > rows.back().first) return 0.0;
      auto it = std::lower_bound(rows.begin(), rows.end(), std::make_pair(x, -std::numeric_limits<double>::infinity()));
      if (it == rows.begin()) return it->second;
      auto prev = it - 1;
      if (it == rows.end() || it->first == prev->first) return prev->second;
      const double w = (x - prev->first) / (it->first - prev->first);
      return (1.0 - w) * prev->second + w * it->second;
    };
  }
  if (r.kind == "random-bumps") {
    std::mt19937_64 rng(c.seed);
    const double L = c.op == "dirichlet" ? std::numbers::pi : c.grid.L;
    const double lo = c.op == "dirichlet" ? 0.25 * L : -0.25 * L, hi = c.op == "dirichlet" ? 0.75 * L : 0.25 * L;
    std::uniform_real_distribution<double> pos(lo, hi), rad(0.02 * L, 0.1 * L), amp(0.2, 2.0);
    std::vector<std::array<double, 3>> bumps;
    for (int k = 0; k < r.count; ++k) {
      const double x0 = pos(rng);
      const double w = rad(rng);
      const double a = amp(rng);
      bumps.push_back({x0, w, a});
    }
    return [bumps](double x) {
      double v = 0.0;
      for (const auto& b : bumps) v += b[2] * bump_shape(std::abs(x - b[0]) / b[1]);
      return v;
    };
  }
  // explicit-profile
  const ModelParams prm = c.model();
  if (r.profile == "linear-kernel") {
    const double t0 = param(r, "t0", 1.0), mass = param(r, "mass", 1.0);
    return [t0, mass, N](double x) { return mass * linear_kernel_eval(std::abs(x), t0, N); };
  }
  if (r.profile == "huang") {
    const double t0 = param(r, "t0", 1.0);
    auto cal = calibrate_huang(param(r, "mass", 1.0), prm);
    return [t0, cal, prm](double x) { return huang_profile_eval(std::abs(x), t0, cal.lambda, cal.R, prm); };
  }
  const double C = extinction_constant_for(c), T = param(r, "T", 1.0), h = c.grid.h();
  const double q = extinction_space_exponent(prm);
  return [C, T, h, q, prm](double x) {
    // Cell average at the singular node.
    if (std::abs(x) < 0.25 * h) return std::pow(C * T, 1.0 / (1.0 - prm.m)) * std::pow(0.5 * h, -q) / (1.0 - q);
    return extinction_solution_eval(std::abs(x), 0.0, C, T, prm);
  };
}

}  // namespace

bool InitialDataRecipe::operator==(const InitialDataRecipe& o) const {
  if (kind != o.kind) return false;
  return (!uses(*this, "mass") || mass == o.mass) && (!uses(*this, "width") || width == o.width) &&
         (!uses(*this, "center") || center == o.center) && (!uses(*this, "radius") || radius == o.radius) &&
         (!uses(*this, "height") || height == o.height) &&
         (!uses(*this, "profile") || (profile == o.profile && params == o.params)) &&
         (!uses(*this, "path") || path == o.path) && (!uses(*this, "count") || count == o.count);
}

bool SnapshotPlan::operator==(const SnapshotPlan& o) const {
  if (spacing != o.spacing) return false;
  if (spacing == "list") return times == o.times;
  return from == o.from && to == o.to && count == o.count;
}

std::vector<double> SnapshotPlan::resolve(double t_end) const {
  if (spacing == "list") return times;
  std::vector<double> t;
  if (count <= 0) return t;
  const double b = to > 0.0 ? to : t_end;
  const double a = from > 0.0 ? from : (spacing == "log" ? b / 100.0 : b / count);
  if (count == 1) return {b};
  for (int i = 0; i < count; ++i) {
    const double u = static_cast<double>(i) / (count - 1);
    t.push_back(spacing == "log" ? a * std::pow(b / a, u) : a + (b - a) * u);
  }
  t.back() = b;
  return t;
}

bool RunConfig::operator==(const RunConfig& o) const {
  auto grid_eq = [](const GridSpec& a, const GridSpec& b) { return a.dim == b.dim && a.n == b.n && a.L == b.L; };
  return id == o.id && grid_eq(grid, o.grid) && m == o.m && s == o.s && nonlinearity == o.nonlinearity &&
         reaction == o.reaction && op == o.op && window.t_min == o.window.t_min && window.t_max == o.window.t_max &&
         window.nodes == o.window.nodes && extension_nodes == o.extension_nodes && extension_cap == o.extension_cap &&
         dirichlet_modes == o.dirichlet_modes && exterior == o.exterior && scheme == o.scheme && t_end == o.t_end &&
         c_cfl == o.c_cfl && dt_max == o.dt_max && dt_min == o.dt_min && blowup_ceiling == o.blowup_ceiling &&
         extinction_threshold == o.extinction_threshold && bulk_fraction == o.bulk_fraction && dealias == o.dealias &&
         snapshots == o.snapshots && initial == o.initial && seed == o.seed && analysis == o.analysis &&
         outputs == o.outputs && operator_check == o.operator_check;
}

ModelParams RunConfig::model() const {
  ModelParams p;
  p.N = op == "dirichlet" ? 1 : grid.dim;
  p.m = m;
  p.s = s;
  if (reaction == "kpp") p.fprime0 = 1.0;
  return p;
}

Nonlinearity RunConfig::make_nonlinearity() const {
  return nonlinearity == "logarithmic" ? Nonlinearity::logarithmic() : Nonlinearity::power(m);
}

Reaction RunConfig::make_reaction() const { return reaction == "kpp" ? Reaction::kpp() : Reaction::none(); }

SolverConfig RunConfig::solver_config() const {
  SolverConfig cfg;
  cfg.op.kind = operator_kind_from_string(op);
  cfg.op.s = s;
  cfg.op.window = window;
  cfg.op.extension_nodes = extension_nodes;
  cfg.op.extension_cap = extension_cap;
  cfg.op.dirichlet_modes = dirichlet_modes;
  cfg.scheme = scheme_from_string(scheme);
  cfg.c_cfl = c_cfl;
  cfg.t_end = t_end;
  cfg.snapshot_times = snapshots.resolve(t_end);
  cfg.blowup_ceiling = blowup_ceiling;
  cfg.dealias = dealias;
  cfg.dt_max = dt_max;
  cfg.dt_min = dt_min;
  cfg.bulk_fraction = bulk_fraction;
  cfg.extinction_threshold = extinction_threshold;
  if (exterior == "profile") {
    const ModelParams prm = model();
    const double C = extinction_constant_for(*this), T = param(initial, "T", 1.0), mm = m;
    const double q = extinction_space_exponent(prm);
    cfg.exterior = ExteriorData{[q, mm](double x) { return std::pow(std::abs(x), -q * mm); },
                                [C, T, mm](double t) { return t < T ? std::pow(C * (T - t), mm / (1.0 - mm)) : 0.0; }};
  }
  return cfg;
}

void RunConfig::validate() const {
  if (id.empty() || id.find_first_of("/\\") != std::string::npos || id == "." || id == "..")
    throw ValidationError("id must be a nonempty name without path separators");
  check_kind(nonlinearity, {"power", "logarithmic"}, "nonlinearity");
  check_kind(reaction, {"none", "kpp"}, "reaction");
  check_kind(exterior, {"zero", "profile"}, "exterior data");
  const auto kind = operator_kind_from_string(op);
  scheme_from_string(scheme);
  if (kind == OperatorKind::dirichlet) {
    if (grid.n < 8) throw ValidationError("Dirichlet runs need at least 8 nodes");
  } else {
    grid.validate();
  }
  FracOrder order(s);
  model().validate();
  make_nonlinearity().validate();
  {
    SolverConfig cfg;
    cfg.op.kind = kind;
    cfg.op.s = s;
    cfg.c_cfl = c_cfl;
    cfg.t_end = t_end;
    cfg.snapshot_times = snapshots.resolve(t_end);
    cfg.dt_max = dt_max;
    cfg.dt_min = dt_min;
    cfg.blowup_ceiling = blowup_ceiling;
    cfg.bulk_fraction = bulk_fraction;
    cfg.extinction_threshold = extinction_threshold;
    cfg.validate();
  }
  if (snapshots.spacing != "list" && snapshots.count < 0) throw ValidationError("snapshot count must be nonnegative");
  if (snapshots.spacing == "log" && snapshots.from < 0.0) throw ValidationError("log snapshots need from > 0");
  if (exterior == "profile") {
    if (kind != OperatorKind::quadrature) throw ValidationError("exterior data need the quadrature operator");
    if (!(initial.kind == "explicit-profile" && initial.profile == "extinction"))
      throw ValidationError("exterior \"profile\" needs the extinction explicit profile");
  }
  if (initial.kind == "explicit-profile" && !profile_names().count(initial.profile))
    throw ValidationError("unknown explicit profile '" + initial.profile + "'");
  if (initial.kind == "gaussian" && !(initial.width > 0.0)) throw ValidationError("gaussian width must be positive");
  if (initial.kind == "indicator" && !(initial.radius > 0.0)) throw ValidationError("indicator radius must be positive");
  if (grid.dim == 2 && initial.center != 0.0 && uses(initial, "center"))
    throw ValidationError("2-D recipes are radial about the origin; center must be 0");
  if (initial.kind == "random-bumps" && initial.count < 1) throw ValidationError("random-bumps needs count >= 1");
  if (!(analysis.front_level > 0.0)) throw ValidationError("front level must be positive");
  if (!(analysis.tolerance > 0.0 && analysis.rate_tolerance > 0.0))
    throw ValidationError("analysis tolerances must be positive");
  if (analysis.decay_window && !(analysis.decay_window->first > 0.0 && analysis.decay_window->second > analysis.decay_window->first))
    throw ValidationError("decay window must satisfy 0 < t_lo < t_hi");
  if (operator_check) {
    if (operator_check->pairs.empty()) throw ValidationError("operator_check needs at least one pair");
    if (!(operator_check->inner_fraction > 0.0 && operator_check->inner_fraction <= 1.0))
      throw ValidationError("inner_fraction must lie in (0, 1]");
    for (const auto& f : operator_check->fields) check_kind(f, {"gaussian", "modulated"}, "test field");
    for (const auto& p : operator_check->pairs) {
      FracOrder(p.s);
      for (const auto& k : {p.reference, p.candidate}) check_kind(k, {"spectral", "quadrature", "semigroup", "extension"}, "operator");
      if (!(p.tolerance > 0.0)) throw ValidationError("pair tolerance must be positive");
    }
  }
}

RunConfig parse_config(const json& j) {
  Section top(j, "config");
  RunConfig c;
  top.get("id", c.id);
  if (top.has("operator")) {
    Section o(j.at("operator"), "operator");
    o.get("kind", c.op);
    if (o.has("semigroup")) {
      Section w(j.at("operator").at("semigroup"), "operator.semigroup");
      w.get("t_min", c.window.t_min);
      w.get("t_max", c.window.t_max);
      w.get("nodes", c.window.nodes);
    }
    if (o.has("extension")) {
      Section e(j.at("operator").at("extension"), "operator.extension");
      e.get("nodes", c.extension_nodes);
      e.get("cap", c.extension_cap);
    }
    o.get("dirichlet_modes", c.dirichlet_modes);
    o.get("exterior", c.exterior);
  }
  {
    Section g(top.at("grid"), "grid");
    GridSpec gs;
    g.get("dim", gs.dim);
    g.get("n", gs.n);
    g.get("L", gs.L);
    c.grid = gs;
  }
  if (top.has("model")) {
    Section m(j.at("model"), "model");
    m.get("m", c.m);
    m.get("s", c.s);
    m.get("nonlinearity", c.nonlinearity);
    m.get("reaction", c.reaction);
  }
  if (top.has("scheme")) {
    Section s(j.at("scheme"), "scheme");
    s.get("kind", c.scheme);
    s.get("c_cfl", c.c_cfl);
    s.get_bound("dt_max", c.dt_max);
    s.get("dt_min", c.dt_min);
    s.get("dealias", c.dealias);
    s.get("bulk_fraction", c.bulk_fraction);
  }
  if (top.has("schedule")) {
    Section s(j.at("schedule"), "schedule");
    s.get("t_end", c.t_end);
    s.get_bound("blowup_ceiling", c.blowup_ceiling);
    s.get("extinction_threshold", c.extinction_threshold);
    if (s.has("snapshots")) c.snapshots = parse_snapshots(j.at("schedule").at("snapshots"));
  }
  if (top.has("initial_data")) c.initial = parse_recipe(j.at("initial_data"));
  top.get("seed", c.seed);
  if (top.has("analysis")) {
    Section a(j.at("analysis"), "analysis");
    if (a.has("decay_window") && !j.at("analysis").at("decay_window").is_null()) {
      std::vector<double> w;
      a.get("decay_window", w);
      if (w.size() != 2) throw ValidationError("analysis.decay_window: expected [t_lo, t_hi]");
      c.analysis.decay_window = std::make_pair(w[0], w[1]);
    }
    a.get("front_level", c.analysis.front_level);
    a.get("tolerance", c.analysis.tolerance);
    a.get("rate_tolerance", c.analysis.rate_tolerance);
  }
  if (top.has("outputs")) {
    Section o(j.at("outputs"), "outputs");
    o.get("snapshots_csv", c.outputs.snapshots_csv);
    o.get("snapshots_raw", c.outputs.snapshots_raw);
  }
  if (top.has("operator_check")) c.operator_check = parse_check(j.at("operator_check"));
  return c;
}

json emit_config(const RunConfig& c) {
  json j;
  j["id"] = c.id;
  j["grid"] = {{"dim", c.grid.dim}, {"n", c.grid.n}, {"L", c.grid.L}};
  j["model"] = {{"m", c.m}, {"s", c.s}, {"nonlinearity", c.nonlinearity}, {"reaction", c.reaction}};
  j["operator"] = {{"kind", c.op},
                   {"semigroup", {{"t_min", c.window.t_min}, {"t_max", c.window.t_max}, {"nodes", c.window.nodes}}},
                   {"extension", {{"nodes", c.extension_nodes}, {"cap", c.extension_cap}}},
                   {"dirichlet_modes", c.dirichlet_modes},
                   {"exterior", c.exterior}};
  j["scheme"] = {{"kind", c.scheme},   {"c_cfl", c.c_cfl},     {"dt_max", bound(c.dt_max)},
                 {"dt_min", c.dt_min}, {"dealias", c.dealias}, {"bulk_fraction", c.bulk_fraction}};
  j["schedule"] = {{"t_end", c.t_end},
                   {"blowup_ceiling", bound(c.blowup_ceiling)},
                   {"extinction_threshold", c.extinction_threshold},
                   {"snapshots", emit_snapshots(c.snapshots)}};
  j["initial_data"] = emit_recipe(c.initial);
  j["seed"] = c.seed;
  json a{{"front_level", c.analysis.front_level},
         {"tolerance", c.analysis.tolerance},
         {"rate_tolerance", c.analysis.rate_tolerance}};
  a["decay_window"] = c.analysis.decay_window
                          ? json::array({c.analysis.decay_window->first, c.analysis.decay_window->second})
                          : json(nullptr);
  j["analysis"] = a;
  j["outputs"] = {{"snapshots_csv", c.outputs.snapshots_csv}, {"snapshots_raw", c.outputs.snapshots_raw}};
  if (c.operator_check) j["operator_check"] = emit_check(*c.operator_check);
  return j;
}

RunConfig load_config(const std::filesystem::path& path) {
  RunConfig c = parse_config(io::read_json(path));
  c.base_dir = path.parent_path();
  return c;
}

double extinction_constant_for(const RunConfig& c) {
  auto it = c.initial.params.find("C");
  if (it != c.initial.params.end()) return it->second;
  return solve_extinction_constant(c.model()).C;
}

Field initial_field(const RunConfig& c) {
  if (c.op == "dirichlet") throw ValidationError("Dirichlet runs sample on (0, pi); use initial_dirichlet");
  auto f = recipe_profile(c);
  const auto& g = c.grid;
  Field u(g);
  for (std::size_t k = 0; k < u.size(); ++k) u[k] = f(g.dim == 1 ? g.coord(k) : g.radius(k));
  u.validate();
  return u;
}

std::vector<double> initial_dirichlet(const RunConfig& c) {
  if (c.initial.kind == "explicit-profile") throw ValidationError("explicit profiles live on the whole line");
  auto f = recipe_profile(c);
  auto x = dirichlet_nodes(c.grid.n);
  std::vector<double> u(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) u[j] = f(x[j]);
  return u;
}

}  // namespace fraclap
