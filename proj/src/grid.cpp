#include "fraclap/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fraclap/error.hpp"

namespace fraclap {

GridSpec::GridSpec(int dim_, std::size_t n_, double L_) : dim(dim_), n(n_), L(L_) { validate(); }

double GridSpec::radius(std::size_t k) const {
  if (dim == 1) return std::abs(coord(k));
  double x = coord(k / n), y = coord(k % n);
  return std::hypot(x, y);
}

void GridSpec::validate() const {
  if (dim != 1 && dim != 2) throw ValidationError("grid dimension must be 1 or 2");
  if (n < 8 || n % 2 != 0) throw ValidationError("grid points per axis must be even and >= 8, got " + std::to_string(n));
  if (!(L > 0.0) || !std::isfinite(L)) throw ValidationError("grid half-length must be positive");
}

Field::Field(const GridSpec& g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size()) throw ValidationError("field length does not match grid");
}

void Field::validate() const {
  grid.validate();
  if (values.size() != grid.size()) throw ValidationError("field length does not match grid");
  for (double v : values)
    if (!std::isfinite(v)) throw ValidationError("field contains non-finite values");
}

Field sample(const GridSpec& g, const std::function<double(double)>& f) {
  Field out(g);
  if (g.dim == 1) {
    for (std::size_t i = 0; i < g.n; ++i) out[i] = f(g.coord(i));
  } else {
    for (std::size_t k = 0; k < g.size(); ++k) out[k] = f(g.radius(k));
  }
  return out;
}

Field sample2d(const GridSpec& g, const std::function<double(double, double)>& f) {
  if (g.dim != 2) throw ValidationError("sample2d needs a 2-D grid");
  Field out(g);
  for (std::size_t i = 0; i < g.n; ++i)
    for (std::size_t j = 0; j < g.n; ++j) out[i * g.n + j] = f(g.coord(i), g.coord(j));
  return out;
}

std::vector<double> dirichlet_nodes(std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = std::numbers::pi * static_cast<double>(j + 1) / static_cast<double>(n + 1);
  return x;
}

}  // namespace fraclap
