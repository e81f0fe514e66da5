#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "fraclap/grid.hpp"
#include "fraclap/solver.hpp"
#include "fraclap/verify.hpp"

namespace fraclap::io {

namespace fs = std::filesystem;
using json = nlohmann::json;

// Shortest text that reads back to the same double; "nan", "inf", "-inf" otherwise.
std::string format_number(double v);

// Columns x,value (1-D) or x,y,value (2-D) with a header row.
void write_field_csv(const fs::path& path, const Field& u);

// <base>.bin holds little-endian float64 values in grid order, <base>.grid the GridSpec.
void write_field_raw(const fs::path& base, const Field& u);
Field read_field_raw(const fs::path& base);
GridSpec read_grid_sidecar(const fs::path& path);

// Non-finite numbers become null.
json number(double v);
void write_json(const fs::path& path, const json& j);
json read_json(const fs::path& path);

json operator_metadata(const std::map<std::string, double>& meta, const std::map<std::string, std::string>& notes);

void write_diagnostics_csv(const fs::path& path, const std::vector<DiagnosticsRow>& rows);
void write_dirichlet_diagnostics_csv(const fs::path& path, const std::vector<DirichletRow>& rows);
void write_series_csv(const fs::path& path, const Series& s);

json to_json(const Verdict& v);
json to_json(const CriterionReport& r);

// Reads a two-column numeric CSV (header optional).
std::vector<std::pair<double, double>> read_table_csv(const fs::path& path);

}  // namespace fraclap::io
