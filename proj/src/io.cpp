#include "fraclap/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "fraclap/error.hpp"

namespace fraclap::io {

namespace {

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw ValidationError("cannot read " + path.string());
  return in;
}

void write_row(std::ostream& out, std::initializer_list<double> vals) {
  bool first = true;
  for (double v : vals) {
    if (!first) out << ',';
    out << format_number(v);
    first = false;
  }
  out << '\n';
}

std::uint64_t to_le(std::uint64_t b) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r = (r << 8) | ((b >> (8 * i)) & 0xff);
    return r;
  }
  return b;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_field_csv(const fs::path& path, const Field& u) {
  auto out = open_out(path);
  const auto& g = u.grid;
  if (g.dim == 1) {
    out << "x,value\n";
    for (std::size_t i = 0; i < g.n; ++i) write_row(out, {g.coord(i), u[i]});
  } else {
    out << "x,y,value\n";
    for (std::size_t i = 0; i < g.n; ++i)
      for (std::size_t j = 0; j < g.n; ++j) write_row(out, {g.coord(i), g.coord(j), u[i * g.n + j]});
  }
}

void write_field_raw(const fs::path& base, const Field& u) {
  u.grid.validate();
  auto bin = open_out(fs::path(base.string() + ".bin"), std::ios::out | std::ios::binary);
  for (double v : u.values) {
    const auto w = to_le(std::bit_cast<std::uint64_t>(v));
    bin.write(reinterpret_cast<const char*>(&w), sizeof w);
  }
  auto side = open_out(fs::path(base.string() + ".grid"));
  side << "dim " << u.grid.dim << '\n'
       << "n " << u.grid.n << '\n'
       << "L " << format_number(u.grid.L) << '\n'
       << "dtype float64-le\n";
}

GridSpec read_grid_sidecar(const fs::path& path) {
  auto in = open_in(path);
  int dim = 0;
  std::size_t n = 0;
  double L = 0.0;
  std::string key, dtype;
  while (in >> key) {
    if (key == "dim") in >> dim;
    else if (key == "n") in >> n;
    else if (key == "L") in >> L;
    else if (key == "dtype") in >> dtype;
    else throw ValidationError("unknown key '" + key + "' in " + path.string());
  }
  if (dtype != "float64-le") throw ValidationError("unsupported dtype in " + path.string());
  return GridSpec(dim, n, L);
}

Field read_field_raw(const fs::path& base) {
  GridSpec g = read_grid_sidecar(fs::path(base.string() + ".grid"));
  const fs::path bin_path(base.string() + ".bin");
  if (fs::file_size(bin_path) != g.size() * sizeof(double))
    throw ValidationError("size of " + bin_path.string() + " does not match its grid sidecar");
  auto in = open_in(bin_path, std::ios::in | std::ios::binary);
  Field f(g);
  for (auto& v : f.values) {
    std::uint64_t w = 0;
    in.read(reinterpret_cast<char*>(&w), sizeof w);
    v = std::bit_cast<double>(to_le(w));
  }
  return f;
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_json(const fs::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  auto in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

json operator_metadata(const std::map<std::string, double>& meta, const std::map<std::string, std::string>& notes) {
  json j = json::object();
  for (const auto& [k, v] : meta) j[k] = number(v);
  for (const auto& [k, v] : notes) j[k] = v;
  return j;
}

void write_diagnostics_csv(const fs::path& path, const std::vector<DiagnosticsRow>& rows) {
  auto out = open_out(path);
  out << "t,dt,mass,l2,l4,linf,min,energy\n";
  for (const auto& r : rows) write_row(out, {r.t, r.dt, r.mass, r.l2, r.l4, r.linf, r.min, r.energy});
}

void write_dirichlet_diagnostics_csv(const fs::path& path, const std::vector<DirichletRow>& rows) {
  auto out = open_out(path);
  out << "t,sup,weighted_mass\n";
  for (const auto& r : rows) write_row(out, {r.t, r.sup, r.weighted_mass});
}

void write_series_csv(const fs::path& path, const Series& s) {
  auto out = open_out(path);
  for (std::size_t c = 0; c < s.columns.size(); ++c) out << (c ? "," : "") << s.columns[c];
  out << '\n';
  for (const auto& row : s.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_number(row[c]);
    out << '\n';
  }
}

json to_json(const Verdict& v) {
  json j{{"claim", v.claim},         {"value", number(v.value)}, {"target", number(v.target)},
         {"tolerance", number(v.tolerance)}, {"relation", v.relation}, {"pass", v.pass}};
  if (!v.note.empty()) j["note"] = v.note;
  return j;
}

json to_json(const CriterionReport& r) {
  json j{{"id", r.id}, {"title", r.title}, {"pass", r.pass()}, {"seconds", number(r.seconds)}};
  j["verdicts"] = json::array();
  for (const auto& v : r.verdicts) j["verdicts"].push_back(to_json(v));
  j["notes"] = json::object();
  for (const auto& [k, v] : r.notes) j["notes"][k] = v;
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

std::vector<std::pair<double, double>> read_table_csv(const fs::path& path) {
  auto in = open_in(path);
  std::vector<std::pair<double, double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double a, b;
    if (!(ss >> a >> b)) {
      if (rows.empty() && lineno == 1) continue;  // header
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": expected two numbers");
    }
    rows.emplace_back(a, b);
  }
  if (rows.empty()) throw ValidationError(path.string() + " holds no rows");
  return rows;
}

}  // namespace fraclap::io
