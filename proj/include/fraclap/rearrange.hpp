#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fraclap/grid.hpp"

namespace fraclap {

// Cell values of a 1-D field listed in order of increasing |x|. Cells sharing a
// distance form a group; group k ends at radius edges[k] and contains the cells
// [group_end[k-1], group_end[k]).
struct RadialProfile {
  GridSpec grid;
  std::vector<double> values;
  std::vector<double> edges;
  std::vector<std::size_t> group_end;

  double cell() const { return grid.h(); }
  // Integral of the profile over the ball of radius edges[k], for every k.
  std::vector<double> cumulative() const;
  bool nonincreasing() const;
  bool same_cells(const RadialProfile& o) const { return grid == o.grid; }
};

// Discrete decreasing rearrangement: sorted values assigned to cells by distance.
RadialProfile schwarz_rearrange(const Field& u);
// The field's own values in radial cell order, each group sorted descending.
RadialProfile radial_trace(const Field& u);
// Symmetric field whose value on each group is the group mean.
Field to_field(const RadialProfile& p);

enum class Concentration { u_less_concentrated, v_less_concentrated, equal, incomparable };
std::string to_string(Concentration c);

constexpr double kConcentrationSlack = 1e-10;

// u is less concentrated than v when every cumulative of u is at most that of v,
// up to a slack relative to the larger total.
Concentration concentration_compare(const RadialProfile& u, const RadialProfile& v,
                                    double slack = kConcentrationSlack);

// Lp norm of the cell values with the cell measure; p = infinity gives the max.
double lp_norm(const RadialProfile& p, double q);
// Sum over paired cells of u_i v_i times the cell measure.
double paired_inner(const RadialProfile& u, const RadialProfile& v);

}  // namespace fraclap
