// fraclap: batch driver for operator checks, runs and verification suites.

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fraclap/config.hpp"
#include "fraclap/diagnostics.hpp"
#include "fraclap/error.hpp"
#include "fraclap/exponents.hpp"
#include "fraclap/fracops.hpp"
#include "fraclap/io.hpp"
#include "fraclap/solver.hpp"
#include "fraclap/verify.hpp"

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace fraclap;
using io::number;

std::string utc_now() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

fs::path output_root(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("FRACLAP_OUT"); env && *env) return env;
  return "fraclap-out";
}

std::string safe_name(std::string s) {
  for (auto& ch : s)
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '.' && ch != '-' && ch != '_') ch = '_';
  return s;
}

// Records every file written below `dir` and writes manifest.json last.
class Manifest {
 public:
  Manifest(std::string id, fs::path dir, json config)
      : id_(std::move(id)), dir_(std::move(dir)), config_(std::move(config)), started_(utc_now()) {
    fs::create_directories(dir_);
  }
  const fs::path& dir() const { return dir_; }
  fs::path add(const std::string& rel) {
    outputs_.push_back(rel);
    return dir_ / rel;
  }
  void write(int exit_code) const {
    json j{{"id", id_},
           {"config", config_},
           {"code_version", FRACLAP_VERSION},
           {"started", started_},
           {"finished", utc_now()},
           {"exit_code", exit_code},
           {"outputs", outputs_}};
    io::write_json(dir_ / "manifest.json", j);
  }

 private:
  std::string id_;
  fs::path dir_;
  json config_;
  std::string started_;
  std::vector<std::string> outputs_;
};

json opt(const std::optional<double>& v) { return v ? number(*v) : json(nullptr); }

json exponent_json(const ExponentTable& e) {
  return json{{"m_c", e.m_c},          {"m_1", e.m_1},         {"m_ex", e.m_ex},
              {"p_star", opt(e.p_star)}, {"alpha", opt(e.alpha)}, {"beta", opt(e.beta)},
              {"alpha_p", opt(e.alpha_p)}, {"delta_p", opt(e.delta_p)}, {"theta_11", opt(e.theta_11)},
              {"sigma_1", opt(e.sigma_1)}, {"sigma_2", opt(e.sigma_2)}, {"sigma_3", opt(e.sigma_3)}};
}

// ---- exponents ----

int cmd_exponents(const ModelParams& p) {
  std::cout << json{{"N", p.N}, {"m", p.m}, {"s", p.s}, {"exponents", exponent_json(derive_exponents(p))}}.dump(2)
            << '\n';
  return kExitOk;
}

// ---- operator-check ----

Field apply_named(const std::string& kind, const Field& u, FracOrder s, const RunConfig& c,
                  std::map<std::string, double>& meta, std::map<std::string, std::string>& notes) {
  if (kind == "spectral") return frac_laplacian_spectral(u, s);
  OperatorResult r;
  if (kind == "quadrature") {
    r = frac_laplacian_quadrature(u, s);
  } else if (kind == "semigroup") {
    r = frac_laplacian_semigroup(u, s, c.window.t_min, c.window.t_max, c.window.nodes);
  } else {
    r = frac_laplacian_extension(u, s, make_extension_mesh(u.grid, s, c.extension_nodes, c.extension_cap));
  }
  meta = r.meta;
  notes = r.notes;
  return r.field;
}

Field test_field(const GridSpec& g, const std::string& name) {
  if (g.dim == 1) {
    if (name == "gaussian") return sample(g, [](double x) { return std::exp(-x * x); });
    return sample(g, [](double x) { return std::exp(-x * x / 4.0) * std::cos(2.0 * x); });
  }
  if (name == "gaussian") return sample2d(g, [](double x, double y) { return std::exp(-x * x - y * y); });
  return sample2d(g, [](double x, double y) { return std::exp(-(x * x + y * y) / 4.0) * std::cos(2.0 * x); });
}

double rel_inner(const Field& a, const Field& ref, double r) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.grid.radius(i) > r) continue;
    num = std::max(num, std::abs(a[i] - ref[i]));
    den = std::max(den, std::abs(ref[i]));
  }
  return num / den;
}

int cmd_operator_check(const RunConfig& c, const fs::path& root) {
  if (!c.operator_check) throw ValidationError("config has no operator_check section");
  if (c.op == "dirichlet") throw ValidationError("operator checks run on the periodic grid");
  const auto& chk = *c.operator_check;
  Manifest man(c.id, root / c.id, emit_config(c));
  CriterionReport rep;
  rep.title = "operator check";
  Series table{"errors", {"pair", "s", "field", "error", "tolerance"}, {}};
  json meta = json::object();
  for (std::size_t k = 0; k < chk.pairs.size(); ++k) {
    const auto& p = chk.pairs[k];
    const FracOrder s(p.s);
    double worst = 0.0;
    for (std::size_t f = 0; f < chk.fields.size(); ++f) {
      Field u = test_field(c.grid, chk.fields[f]);
      std::map<std::string, double> mr, mc;
      std::map<std::string, std::string> nr, nc;
      Field ref = apply_named(p.reference, u, s, c, mr, nr);
      Field cand = apply_named(p.candidate, u, s, c, mc, nc);
      const double e = rel_inner(cand, ref, chk.inner_fraction * c.grid.L);
      table.rows.push_back({static_cast<double>(k), p.s, static_cast<double>(f), e, p.tolerance});
      worst = std::max(worst, e);
      const std::string tag = p.reference + "_vs_" + p.candidate + "." + io::format_number(p.s) + "." + chk.fields[f];
      meta[tag] = {{"reference", io::operator_metadata(mr, nr)}, {"candidate", io::operator_metadata(mc, nc)}};
    }
    rep.verdicts.push_back(
        at_most(p.candidate + "_vs_" + p.reference + ".s=" + io::format_number(p.s), worst, p.tolerance,
                "relative sup error on |x| <= " + io::format_number(chk.inner_fraction) + " L"));
  }
  io::write_series_csv(man.add("errors.csv"), table);
  io::write_json(man.add("operator_meta.json"), meta);
  json verdicts = json::array();
  for (const auto& v : rep.verdicts) {
    std::printf("%-48s %s value=%.3e tol=%.3e\n", v.claim.c_str(), v.pass ? "PASS" : "FAIL", v.value, v.target);
    verdicts.push_back(io::to_json(v));
  }
  const bool ok = rep.pass();
  io::write_json(man.add("verdicts.json"), json{{"id", c.id}, {"pass", ok}, {"verdicts", verdicts}});
  const int code = ok ? kExitOk : kExitTolerance;
  man.write(code);
  return code;
}

// ---- solve ----

json norms_json(const DiagnosticsRow& d) {
  return json{{"t", d.t},   {"mass", number(d.mass)}, {"l2", number(d.l2)},        {"l4", number(d.l4)},
              {"linf", number(d.linf)}, {"min", number(d.min)}, {"energy", number(d.energy)}};
}

std::pair<double, double> decay_window(const RunConfig& c) {
  return c.analysis.decay_window.value_or(std::make_pair(c.t_end / 10.0, c.t_end));
}

json decay_summary(const FitResult& fit, double target, double tol, std::pair<double, double> win) {
  const Verdict v = within("decay_slope", fit.slope, target, tol * std::abs(target));
  return json{{"slope", number(fit.slope)},      {"target", number(target)}, {"residual", number(fit.residual)},
              {"window", {win.first, win.second}}, {"points", fit.points()},   {"verdict", io::to_json(v)}};
}

json front_summary(const RunConfig& c, const Trajectory& tr, Manifest& man) {
  auto fs_ = front_radius(tr, c.analysis.front_level);
  Series ser{"front", {"t", "radius"}, {}};
  for (std::size_t i = 0; i < fs_.t.size(); ++i) ser.rows.push_back({fs_.t[i], fs_.radius[i]});
  io::write_series_csv(man.add("front.csv"), ser);
  const double h = c.grid.h(), L = c.grid.L;
  double t_lo = -1.0, t_hi = -1.0;
  for (std::size_t i = 0; i < fs_.t.size(); ++i) {
    if (fs_.radius[i] > 20.0 * h && t_lo < 0.0) t_lo = fs_.t[i];
    if (fs_.radius[i] < L / 4.0) t_hi = fs_.t[i];
  }
  json j{{"level", c.analysis.front_level}, {"reached_edge", fs_.reached_edge}};
  if (t_lo < 0.0 || t_hi <= t_lo) {
    j["error"] = "front never crossed the fit window 20h < R < L/4";
    return j;
  }
  const auto fe = front_rate_fit(fs_, t_lo, t_hi);
  const auto fl = front_linear_fit(fs_, t_lo, t_hi);
  const auto e = derive_exponents(c.model());
  const double tol = c.analysis.rate_tolerance;
  j["window"] = {t_lo, t_hi};
  j["sigma_hat"] = number(fe.slope);
  j["log_residual_exponential"] = number(fe.residual);
  j["log_residual_linear"] = number(fl.residual);
  j["sigma_1"] = opt(e.sigma_1);
  j["sigma_2"] = opt(e.sigma_2);
  j["sigma_3"] = opt(e.sigma_3);
  json verdicts = json::array();
  if (e.sigma_2 && e.sigma_3) {
    const double lo = 0.8 * *e.sigma_2, hi = 1.2 * *e.sigma_3;
    j["bracket"] = {lo, hi};
    verdicts.push_back(io::to_json(within("sigma_hat_in_bracket", fe.slope, 0.5 * (lo + hi), 0.5 * (hi - lo),
                                          "[0.8 sigma_2, 1.2 sigma_3]")));
  }
  if (c.m < 1.0 && e.sigma_1)
    verdicts.push_back(io::to_json(within("sigma_hat_vs_sigma_1", fe.slope, *e.sigma_1, tol * *e.sigma_1)));
  if (c.m == 1.0 && e.sigma_2)
    verdicts.push_back(io::to_json(within("sigma_hat_vs_sigma_2", fe.slope, *e.sigma_2, tol * *e.sigma_2)));
  verdicts.push_back(io::to_json(holds("exponential_beats_linear", fe.residual < fl.residual)));
  j["verdicts"] = verdicts;
  return j;
}

int solve_periodic(const RunConfig& c, Manifest& man, json& summary) {
  const Field u0 = initial_field(c);
  const auto cfg = c.solver_config();
  const auto tr = solve(u0, c.make_nonlinearity(), c.make_reaction(), cfg);

  io::write_diagnostics_csv(man.add("diagnostics.csv"), tr.diagnostics);
  Series index{"snapshots", {"index", "t"}, {}};
  for (std::size_t k = 0; k < tr.snapshots.size(); ++k) {
    char base[32];
    std::snprintf(base, sizeof base, "snapshots/snap_%04zu", k);
    const auto& sn = tr.snapshots[k];
    if (c.outputs.snapshots_csv) io::write_field_csv(man.add(std::string(base) + ".csv"), sn.u);
    if (c.outputs.snapshots_raw) {
      io::write_field_raw(man.dir() / base, sn.u);
      man.add(std::string(base) + ".bin");
      man.add(std::string(base) + ".grid");
    }
    index.rows.push_back({static_cast<double>(k), sn.t});
  }
  io::write_series_csv(man.add("snapshots.csv"), index);

  summary["steps"] = tr.steps;
  summary["t_final"] = tr.snapshots.back().t;
  summary["meta"] = tr.meta;
  summary["final_norms"] = norms_json(tr.diagnostics.back());
  if (tr.extinction) {
    auto [lo, hi] = extinction_time(tr);
    summary["extinction"] = {{"t_lo", lo}, {"t_hi", hi}};
  } else {
    summary["extinction"] = nullptr;
  }
  const auto e = derive_exponents(c.model());
  summary["exponents"] = exponent_json(e);
  json fits = json::object();
  if (!c.make_reaction().active() && !tr.extinction && e.alpha && c.nonlinearity == "power") {
    const auto win = decay_window(c);
    fits["decay"] = decay_summary(decay_rate_fit(tr, win.first, win.second), -*e.alpha, c.analysis.tolerance, win);
  }
  if (c.make_reaction().active()) fits["front"] = front_summary(c, tr, man);
  summary["fits"] = fits;
  return kExitOk;
}

int solve_dirichlet_run(const RunConfig& c, Manifest& man, json& summary) {
  const auto u0 = initial_dirichlet(c);
  const auto cfg = c.solver_config();
  if (c.make_reaction().active()) throw ValidationError("Dirichlet runs take no reaction term");
  const auto tr = solve_dirichlet(u0, c.make_nonlinearity(), cfg);
  io::write_dirichlet_diagnostics_csv(man.add("diagnostics.csv"), tr.diagnostics);
  Series index{"snapshots", {"index", "t"}, {}};
  for (std::size_t k = 0; k < tr.snapshots.size(); ++k) {
    char name[40];
    std::snprintf(name, sizeof name, "snapshots/snap_%04zu.csv", k);
    const auto& sn = tr.snapshots[k];
    Series s{"snapshot", {"x", "value", "ratio"}, {}};
    for (std::size_t j = 0; j < tr.x.size(); ++j)
      s.rows.push_back({tr.x[j], sn.u[j], j < sn.ratio.size() ? sn.ratio[j] : std::nan("")});
    if (c.outputs.snapshots_csv) io::write_series_csv(man.add(name), s);
    index.rows.push_back({static_cast<double>(k), sn.t});
  }
  io::write_series_csv(man.add("snapshots.csv"), index);
  summary["steps"] = tr.steps;
  summary["t_final"] = tr.snapshots.back().t;
  summary["final_norms"] = {{"t", tr.diagnostics.back().t},
                            {"linf", number(tr.diagnostics.back().sup)},
                            {"weighted_mass", number(tr.diagnostics.back().weighted_mass)}};
  summary["extinction"] = nullptr;
  json fits = json::object();
  if (c.nonlinearity == "power" && c.m > 1.0) {
    std::vector<double> t, q;
    for (const auto& d : tr.diagnostics) {
      t.push_back(d.t);
      q.push_back(d.sup);
    }
    const auto win = decay_window(c);
    fits["decay"] =
        decay_summary(decay_rate_fit(t, q, win.first, win.second), -1.0 / (c.m - 1.0), c.analysis.tolerance, win);
  }
  summary["fits"] = fits;
  return kExitOk;
}

int cmd_solve(const RunConfig& c, const fs::path& root) {
  Manifest man(c.id, root / c.id, emit_config(c));
  json summary{{"id", c.id}};
  int code = kExitOk;
  try {
    code = c.op == "dirichlet" ? solve_dirichlet_run(c, man, summary) : solve_periodic(c, man, summary);
    summary["status"] = "completed";
  } catch (const BlowUpError& e) {
    code = e.exit_code();
    summary["status"] = "blow-up";
    summary["error"] = e.what();
  } catch (const CflDeadlockError& e) {
    code = e.exit_code();
    summary["status"] = "cfl-deadlock";
    summary["error"] = e.what();
  }
  io::write_json(man.add("summary.json"), summary);
  man.write(code);
  std::printf("%s: %s, outputs in %s\n", c.id.c_str(), summary["status"].get<std::string>().c_str(),
              man.dir().string().c_str());
  if (summary.contains("error")) std::fprintf(stderr, "fraclap: %s\n", summary["error"].get<std::string>().c_str());
  return code;
}

// ---- verify ----

std::vector<CriterionReport> run_criteria(const std::vector<int>& ids, int threads) {
  std::vector<CriterionReport> out(ids.size());
  if (threads <= 1 || ids.size() <= 1) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      out[i] = run_criterion(ids[i]);
      std::printf("%s\n", summary_line(out[i]).c_str());
      std::fflush(stdout);
    }
    return out;
  }
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < std::min<int>(threads, static_cast<int>(ids.size())); ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < ids.size(); i = next++) out[i] = run_criterion(ids[i]);
      });
  }
  for (const auto& r : out) std::printf("%s\n", summary_line(r).c_str());
  return out;
}

int cmd_verify(const std::string& suite, const fs::path& root, int threads) {
  const auto ids = suite_criteria(suite);
  const std::string id = "verify-" + suite;
  Manifest man(id, root / id, json{{"suite", suite}, {"threads", threads}});
  const auto reports = run_criteria(ids, threads);
  json crit = json::array();
  bool ok = true;
  for (const auto& r : reports) {
    json j = io::to_json(r);
    json files = json::array();
    for (const auto& s : r.series) {
      const std::string rel = "series/c" + std::to_string(r.id) + "_" + safe_name(s.name) + ".csv";
      io::write_series_csv(man.add(rel), s);
      files.push_back(rel);
    }
    j["series"] = files;
    crit.push_back(j);
    ok = ok && r.pass();
  }
  io::write_json(man.add("verdicts.json"), json{{"suite", suite}, {"pass", ok}, {"criteria", crit}});
  const int code = ok ? kExitOk : kExitTolerance;
  man.write(code);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fractional porous medium toolkit: operator checks, runs and verification suites"};
  app.require_subcommand(1);
  std::string config_path, out_dir, suite;
  int threads = 1;
  ModelParams model;

  auto* exps = app.add_subcommand("exponents", "Print the exponent table for (N, m, s)");
  exps->add_option("--N", model.N, "Space dimension")->default_val(1);
  exps->add_option("--m", model.m, "Nonlinearity exponent")->required();
  exps->add_option("--s", model.s, "Fractional order in (0, 1)")->required();
  double fprime0 = 0.0;
  auto* fp = exps->add_option("--fprime0", fprime0, "Reaction slope f'(0) for the KPP rates");

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output root (default $FRACLAP_OUT or ./fraclap-out)");
    sub->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  };
  auto* check = app.add_subcommand("operator-check", "Cross-check operator realizations");
  add_common(check);
  auto* solve_cmd = app.add_subcommand("solve", "Run one configuration and write its artifacts");
  add_common(solve_cmd);
  auto* verify = app.add_subcommand("verify", "Run an acceptance suite");
  verify->add_option("suite", suite, "operators, semigroup-properties, barenblatt, extinction, symmetrization, kpp, "
                                     "dirichlet or all")
      ->required();
  verify->add_option("--out", out_dir, "Output root (default $FRACLAP_OUT or ./fraclap-out)");
  verify->add_option("--threads", threads, "Criteria run concurrently")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*exps) {
      if (*fp) model.fprime0 = fprime0;
      return cmd_exponents(model);
    }
    const fs::path root = output_root(out_dir);
    if (*verify) return cmd_verify(suite, root, threads);
    RunConfig c = load_config(config_path);
    c.validate();
    if (*check) return cmd_operator_check(c, root);
    return cmd_solve(c, root);
  } catch (const fraclap::Error& e) {
    std::fprintf(stderr, "fraclap: %s\n", e.what());
    return e.exit_code();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "fraclap: %s\n", e.what());
    return kExitTolerance;
  }
}
