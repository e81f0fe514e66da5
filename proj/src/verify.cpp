#include "fraclap/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>

#include "fraclap/error.hpp"
#include "fraclap/experiments.hpp"

namespace fraclap {

Verdict within(std::string claim, double value, double target, double tolerance, std::string note) {
  Verdict v{std::move(claim), value, target, tolerance, "within", false, std::move(note)};
  v.pass = std::isfinite(value) && std::abs(value - target) <= tolerance;
  return v;
}

Verdict at_most(std::string claim, double value, double bound, std::string note) {
  Verdict v{std::move(claim), value, bound, 0.0, "at_most", false, std::move(note)};
  v.pass = std::isfinite(value) && value <= bound;
  return v;
}

Verdict at_least(std::string claim, double value, double bound, std::string note) {
  Verdict v{std::move(claim), value, bound, 0.0, "at_least", false, std::move(note)};
  v.pass = std::isfinite(value) && value >= bound;
  return v;
}

Verdict holds(std::string claim, bool ok, std::string note) {
  Verdict v{std::move(claim), ok ? 1.0 : 0.0, 1.0, 0.0, "holds", ok, std::move(note)};
  return v;
}

bool CriterionReport::pass() const {
  if (!error.empty() || verdicts.empty()) return false;
  for (const auto& v : verdicts)
    if (!v.pass) return false;
  return true;
}

std::string criterion_title(int id) {
  static const char* titles[] = {"",
                                 "operator cross-validation",
                                 "linear kernel reproduction",
                                 "semigroup properties",
                                 "smoothing exponent",
                                 "Barenblatt attraction",
                                 "tail laws",
                                 "extinction",
                                 "weighted-L1 growth scaling",
                                 "symmetrization",
                                 "KPP rates",
                                 "Dirichlet boundary behavior",
                                 "exponent table invariants"};
  if (id < 1 || id > kCriterionCount) throw ValidationError("criterion id must lie in 1..12");
  return titles[id];
}

CriterionReport run_criterion(int id) {
  CriterionReport r;
  r.id = id;
  r.title = criterion_title(id);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    switch (id) {
      case 1: experiments::operator_cross_validation(r); break;
      case 2: experiments::linear_kernel(r); break;
      case 3: experiments::semigroup_properties(r); break;
      case 4: experiments::smoothing_exponent(r); break;
      case 5: experiments::barenblatt_attraction(r); break;
      case 6: experiments::tail_laws(r); break;
      case 7: experiments::extinction(r); break;
      case 8: experiments::weighted_growth(r); break;
      case 9: experiments::symmetrization(r); break;
      case 10: experiments::kpp_rates(r); break;
      case 11: experiments::dirichlet_behavior(r); break;
      case 12: experiments::exponent_invariants(r); break;
    }
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (id == 1) r.verdicts.push_back(at_most("1.runtime_seconds", r.seconds, 120.0));
  if (id == 12) r.verdicts.push_back(at_most("12.runtime_seconds", r.seconds, 1.0));
  return r;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"operators", "semigroup-properties", "barenblatt", "extinction",
                                                 "symmetrization", "kpp", "dirichlet", "all"};
  return names;
}

std::vector<int> suite_criteria(const std::string& suite) {
  static const std::map<std::string, std::vector<int>> table = {
      {"operators", {1}},        {"semigroup-properties", {3, 4, 12}}, {"barenblatt", {2, 5, 6}},
      {"extinction", {7, 8}},    {"symmetrization", {9}},              {"kpp", {10}},
      {"dirichlet", {11}},       {"all", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12}}};
  auto it = table.find(suite);
  if (it == table.end()) throw ValidationError("unknown suite '" + suite + "'");
  return it->second;
}

std::string summary_line(const CriterionReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "criterion %2d %s (%.1f s) %s", r.id, r.pass() ? "PASS" : "FAIL", r.seconds,
                r.title.c_str());
  std::string line = buf;
  if (!r.error.empty()) line += " [error: " + r.error + "]";
  for (const auto& v : r.verdicts)
    if (!v.pass) line += " [failed: " + v.claim + "]";
  return line;
}

}  // namespace fraclap
