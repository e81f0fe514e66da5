#include "fraclap/rearrange.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fraclap/error.hpp"

namespace fraclap {

namespace {

void require_1d(const Field& u) {
  if (u.grid.dim != 1) throw ValidationError("rearrangement is implemented for 1-D grids");
  if (u.size() != u.grid.n) throw ValidationError("field length does not match its grid");
}

// Node indices ordered by distance to the origin: 0, then -h and +h, ..., then -L.
struct RadialOrder {
  std::vector<std::size_t> cells;
  std::vector<double> edges;
  std::vector<std::size_t> group_end;
};

RadialOrder radial_order(const GridSpec& g) {
  RadialOrder ro;
  const std::size_t n = g.n, c = n / 2;
  const double h = g.h();
  ro.cells.push_back(c);
  ro.edges.push_back(0.5 * h);
  ro.group_end.push_back(1);
  for (std::size_t k = 1; k < c; ++k) {
    ro.cells.push_back(c - k);
    ro.cells.push_back(c + k);
    ro.edges.push_back((static_cast<double>(k) + 0.5) * h);
    ro.group_end.push_back(ro.cells.size());
  }
  ro.cells.push_back(0);
  ro.edges.push_back(g.L);
  ro.group_end.push_back(ro.cells.size());
  return ro;
}

}  // namespace

std::vector<double> RadialProfile::cumulative() const {
  std::vector<double> out;
  out.reserve(group_end.size());
  double sum = 0.0;
  std::size_t i = 0;
  for (std::size_t end : group_end) {
    for (; i < end; ++i) sum += values[i];
    out.push_back(sum * cell());
  }
  return out;
}

bool RadialProfile::nonincreasing() const {
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[i - 1]) return false;
  return true;
}

RadialProfile schwarz_rearrange(const Field& u) {
  require_1d(u);
  for (double v : u.values) {
    if (!std::isfinite(v)) throw ValidationError("rearrangement input must be finite");
    if (v < 0.0) throw ValidationError("rearrangement input must be nonnegative");
  }
  auto ro = radial_order(u.grid);
  std::vector<std::size_t> idx(u.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return u[a] > u[b]; });
  RadialProfile p{u.grid, std::vector<double>(u.size()), std::move(ro.edges), std::move(ro.group_end)};
  for (std::size_t k = 0; k < idx.size(); ++k) p.values[k] = u[idx[k]];
  return p;
}

RadialProfile radial_trace(const Field& u) {
  require_1d(u);
  auto ro = radial_order(u.grid);
  RadialProfile p{u.grid, std::vector<double>(u.size()), std::move(ro.edges), std::move(ro.group_end)};
  for (std::size_t k = 0; k < ro.cells.size(); ++k) p.values[k] = u[ro.cells[k]];
  std::size_t begin = 0;
  for (std::size_t end : p.group_end) {
    std::sort(p.values.begin() + begin, p.values.begin() + end, std::greater<>());
    begin = end;
  }
  return p;
}

Field to_field(const RadialProfile& p) {
  auto ro = radial_order(p.grid);
  Field f(p.grid);
  std::size_t begin = 0;
  for (std::size_t end : p.group_end) {
    double mean = 0.0;
    for (std::size_t k = begin; k < end; ++k) mean += p.values[k];
    mean /= static_cast<double>(end - begin);
    for (std::size_t k = begin; k < end; ++k) f[ro.cells[k]] = mean;
    begin = end;
  }
  return f;
}

std::string to_string(Concentration c) {
  switch (c) {
    case Concentration::u_less_concentrated: return "u_less_concentrated";
    case Concentration::v_less_concentrated: return "v_less_concentrated";
    case Concentration::equal: return "equal";
    case Concentration::incomparable: return "incomparable";
  }
  return "?";
}

Concentration concentration_compare(const RadialProfile& u, const RadialProfile& v, double slack) {
  if (!u.same_cells(v) || u.group_end != v.group_end) throw ValidationError("profiles have different cell structures");
  auto cu = u.cumulative(), cv = v.cumulative();
  double scale = 0.0;
  for (std::size_t k = 0; k < cu.size(); ++k) scale = std::max({scale, std::abs(cu[k]), std::abs(cv[k])});
  const double tol = slack * scale;
  bool u_le = true, v_le = true;
  for (std::size_t k = 0; k < cu.size(); ++k) {
    u_le &= cu[k] <= cv[k] + tol;
    v_le &= cv[k] <= cu[k] + tol;
  }
  if (u_le && v_le) return Concentration::equal;
  if (u_le) return Concentration::u_less_concentrated;
  if (v_le) return Concentration::v_less_concentrated;
  return Concentration::incomparable;
}

double lp_norm(const RadialProfile& p, double q) {
  if (!(q >= 1.0)) throw ValidationError("Lp index must be >= 1");
  if (std::isinf(q)) {
    double m = 0.0;
    for (double v : p.values) m = std::max(m, std::abs(v));
    return m;
  }
  double sum = 0.0;
  for (double v : p.values) sum += std::pow(std::abs(v), q);
  return std::pow(sum * p.cell(), 1.0 / q);
}

double paired_inner(const RadialProfile& u, const RadialProfile& v) {
  if (!u.same_cells(v)) throw ValidationError("profiles have different cell structures");
  double sum = 0.0;
  for (std::size_t i = 0; i < u.values.size(); ++i) sum += u.values[i] * v.values[i];
  return sum * u.cell();
}

}  // namespace fraclap
