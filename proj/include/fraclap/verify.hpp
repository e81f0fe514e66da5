#pragma once

#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace fraclap {

// One checked claim: {claim id, fitted value, target, tolerance, pass}.
// `relation` is "within" (|value - target| <= tolerance), "at_most", "at_least" or "holds".
struct Verdict {
  std::string claim;
  double value = std::numeric_limits<double>::quiet_NaN();
  double target = std::numeric_limits<double>::quiet_NaN();
  double tolerance = 0.0;
  std::string relation = "within";
  bool pass = false;
  std::string note;
};

Verdict within(std::string claim, double value, double target, double tolerance, std::string note = {});
Verdict at_most(std::string claim, double value, double bound, std::string note = {});
Verdict at_least(std::string claim, double value, double bound, std::string note = {});
Verdict holds(std::string claim, bool ok, std::string note = {});

// A named table of numbers for CSV export.
struct Series {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct CriterionReport {
  int id = 0;
  std::string title;
  std::vector<Verdict> verdicts;
  std::vector<Series> series;
  std::vector<std::pair<std::string, std::string>> notes;
  double seconds = 0.0;
  std::string error;  // set when the criterion aborted with an exception

  bool pass() const;
};

constexpr int kCriterionCount = 12;

std::string criterion_title(int id);
// Runs one acceptance criterion (1..12) at desk scale. Exceptions from the
// numerics are caught and recorded as a failed report.
CriterionReport run_criterion(int id);

// Suite name to criterion ids; throws ValidationError on unknown names.
std::vector<int> suite_criteria(const std::string& suite);
const std::vector<std::string>& suite_names();

// "criterion 3 PASS (12.1 s) semigroup properties" style line.
std::string summary_line(const CriterionReport& r);

}  // namespace fraclap
