#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace fraclap {

// Periodic box [-L, L)^N with n points per axis.
struct GridSpec {
  int dim = 1;
  std::size_t n = 0;
  double L = 0.0;

  GridSpec() = default;
  GridSpec(int dim_, std::size_t n_, double L_);

  double h() const { return 2.0 * L / static_cast<double>(n); }
  std::size_t size() const { return dim == 1 ? n : n * n; }
  double coord(std::size_t i) const { return -L + h() * static_cast<double>(i); }
  // Distance of flat index k to the origin.
  double radius(std::size_t k) const;
  double cell_volume() const { return dim == 1 ? h() : h() * h(); }

  void validate() const;
  bool operator==(const GridSpec& o) const { return dim == o.dim && n == o.n && L == o.L; }
};

struct Field {
  GridSpec grid;
  std::vector<double> values;

  Field() = default;
  explicit Field(const GridSpec& g) : grid(g), values(g.size(), 0.0) {}
  Field(const GridSpec& g, std::vector<double> v);

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }

  // Throws ValidationError on non-finite entries or length mismatch.
  void validate() const;
};

Field sample(const GridSpec& g, const std::function<double(double)>& f);
Field sample2d(const GridSpec& g, const std::function<double(double, double)>& f);

// Uniform interior grid of (0, pi) with n points, x_j = j*pi/(n+1).
std::vector<double> dirichlet_nodes(std::size_t n);

}  // namespace fraclap
