#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fraclap/error.hpp"
#include "fraclap/fracops.hpp"
#include "test_util.hpp"

using namespace fraclap;
using testutil::max_abs;
using testutil::max_diff;

namespace {
const double kPi = std::numbers::pi;

Field gaussian(const GridSpec& g) {
  return sample(g, [](double x) { return std::exp(-x * x); });
}
}  // namespace

TEST_CASE("frac order band") {
  CHECK_THROWS_AS(FracOrder(0.99), ValidationError);
  CHECK_THROWS_AS(FracOrder(0.0), ValidationError);
  CHECK_THROWS_AS(FracOrder(0.05), ValidationError);
  CHECK_NOTHROW(FracOrder(0.5));
  CHECK(FracOrder(0.3).sigma() == doctest::Approx(0.6));
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(GridSpec(1, 7, 1.0), ValidationError);
  CHECK_THROWS_AS(GridSpec(1, 6, 1.0), ValidationError);
  CHECK_THROWS_AS(GridSpec(3, 16, 1.0), ValidationError);
  CHECK_THROWS_AS(GridSpec(1, 16, -1.0), ValidationError);
  GridSpec g(1, 16, kPi);
  CHECK(g.h() == doctest::Approx(kPi / 8));
  Field f(g);
  f[3] = std::nan("");
  CHECK_THROWS_AS(f.validate(), ValidationError);
}

TEST_CASE("constants") {
  CHECK(quadrature_constant(1, 0.5) == doctest::Approx(1.0 / kPi).epsilon(1e-14));
  // Independent form: C_{1,2s} = s 4^s Gamma(1/2 + s) / (sqrt(pi) Gamma(1 - s)).
  for (double s : {0.2, 0.25, 0.6, 0.75}) {
    double ref = s * std::pow(4.0, s) * std::tgamma(0.5 + s) / (std::sqrt(kPi) * std::tgamma(1.0 - s));
    CHECK(quadrature_constant(1, s) == doctest::Approx(ref).epsilon(1e-13));
  }
  // N = 2, s = 1/2: 2 * (1/2) * Gamma(3/2) / (pi Gamma(1/2)) = 1/(2 pi).
  CHECK(quadrature_constant(2, 0.5) == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-14));
  CHECK(extension_constant(1.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("spectral operator: eigenfunctions on an s lattice") {
  GridSpec g(1, 64, kPi);
  for (int si = 1; si <= 9; ++si) {
    double s = 0.1 * si;
    for (int k : {1, 2, 5, 17, 31}) {
      Field c = sample(g, [k](double x) { return std::cos(k * x); });
      Field out = frac_laplacian_spectral(c, FracOrder(s));
      double lam = std::pow(double(k), 2 * s);
      for (std::size_t i = 0; i < g.n; ++i) REQUIRE(out[i] == doctest::Approx(lam * c[i]).epsilon(1e-12).scale(lam));
    }
  }
}

TEST_CASE("spectral operator: examples") {
  GridSpec g(1, 64, kPi);
  Field c = sample(g, [](double) { return 3.7; });
  CHECK(max_abs(frac_laplacian_spectral(c, FracOrder(0.4)).values) < 1e-13);
  Field two = sample(g, [](double x) { return std::cos(x) + std::cos(2 * x); });
  Field out = frac_laplacian_spectral(two, FracOrder(0.5));
  for (std::size_t i = 0; i < g.n; ++i) {
    double x = g.coord(i);
    CHECK(out[i] == doctest::Approx(std::cos(x) + 2 * std::cos(2 * x)).epsilon(1e-12).scale(1.0));
  }
  Field bad(g);
  bad[0] = INFINITY;
  CHECK_THROWS_AS(frac_laplacian_spectral(bad, FracOrder(0.5)), ValidationError);
}

TEST_CASE("spectral operator: symmetry and positivity of the form") {
  std::mt19937_64 rng(7);
  GridSpec g(1, 128, 5.0);
  std::normal_distribution<double> nd;
  for (double s : {0.2, 0.5, 0.8}) {
    for (int trial = 0; trial < 5; ++trial) {
      Field a(g), b(g);
      for (std::size_t i = 0; i < g.n; ++i) {
        a[i] = nd(rng);
        b[i] = nd(rng);
      }
      Field Aa = frac_laplacian_spectral(a, FracOrder(s));
      Field Ab = frac_laplacian_spectral(b, FracOrder(s));
      double l = testutil::dot(Aa.values, b.values), r = testutil::dot(a.values, Ab.values);
      CHECK(std::abs(l - r) <= 1e-11 * (std::abs(l) + 1.0));
      CHECK(testutil::dot(Aa.values, a.values) > 0.0);
    }
    Field c = sample(g, [](double) { return -2.0; });
    CHECK(std::abs(testutil::dot(frac_laplacian_spectral(c, FracOrder(s)).values, c.values)) < 1e-10);
  }
}

TEST_CASE("spectral operator in two dimensions") {
  GridSpec g(2, 32, kPi);
  Field f = sample2d(g, [](double x, double y) { return std::cos(x) * std::cos(2 * y); });
  Field out = frac_laplacian_spectral(f, FracOrder(0.5));
  for (std::size_t k = 0; k < g.size(); ++k)
    CHECK(out[k] == doctest::Approx(std::sqrt(5.0) * f[k]).epsilon(1e-12).scale(1.0));
}

TEST_CASE("riesz inverse pairs") {
  std::mt19937_64 rng(11);
  GridSpec g(1, 128, 4.0);
  for (double s : {0.25, 0.5, 0.75}) {
    Field zero_mean = testutil::band_limited(g, 20, rng);
    Field back = frac_laplacian_spectral(riesz_inverse(zero_mean, FracOrder(s)), FracOrder(s));
    CHECK(max_diff(back.values, zero_mean.values) < 1e-11 * max_abs(zero_mean.values));

    Field with_mean = testutil::band_limited(g, 20, rng, true);
    double mean = 0.0;
    for (double v : with_mean.values) mean += v;
    mean /= g.n;
    Field lap = frac_laplacian_spectral(with_mean, FracOrder(s));
    Field proj = riesz_inverse(lap, FracOrder(s));
    for (std::size_t i = 0; i < g.n; ++i) CHECK(proj[i] == doctest::Approx(with_mean[i] - mean).scale(1.0).epsilon(1e-10));
    CHECK_THROWS_AS(riesz_inverse(with_mean, FracOrder(s)), ValidationError);
  }
  Field c = sample(g, [](double x) { return std::cos(kPi * 3 * x / 4.0); });
  Field out = riesz_inverse(c, FracOrder(0.5));
  double k = kPi * 3 / 4.0;
  for (std::size_t i = 0; i < g.n; ++i) CHECK(out[i] == doctest::Approx(c[i] / k).scale(1.0).epsilon(1e-12));
}

TEST_CASE("semigroup realization") {
  GridSpec g(1, 64, kPi);
  for (double s : {0.25, 0.5, 0.75}) {
    for (int k : {1, 3, 8}) {
      Field c = sample(g, [k](double x) { return std::cos(k * x); });
      auto res = frac_laplacian_semigroup(c, FracOrder(s), 1e-6, 1e3, 256);
      double lam = std::pow(double(k), 2 * s);
      for (std::size_t i = 0; i < g.n; ++i)
        REQUIRE(std::abs(res.field[i] - lam * c[i]) <= 1e-4 * lam);
      CHECK(res.meta.count("small_t_remainder_bound") == 1);
    }
    Field con = sample(g, [](double) { return 1.5; });
    CHECK(max_abs(frac_laplacian_semigroup(con, FracOrder(s), 1e-6, 1e3, 256).field.values) < 1e-13);
  }
  std::mt19937_64 rng(3);
  GridSpec wide(1, 256, 8.0);
  for (double s : {0.25, 0.5, 0.75}) {
    Field f = testutil::band_limited(wide, 30, rng);
    Field a = frac_laplacian_spectral(f, FracOrder(s));
    Field b = frac_laplacian_semigroup(f, FracOrder(s), 1e-6, 1e3, 256).field;
    CHECK(max_diff(a.values, b.values) <= 1e-3 * max_abs(a.values));
  }
  Field c = sample(g, [](double x) { return std::cos(x); });
  CHECK_THROWS_AS(frac_laplacian_semigroup(c, FracOrder(0.5), 1e-1, 2.0, 64, 1e-3), NumericalError);
  CHECK_THROWS_AS(frac_laplacian_semigroup(c, FracOrder(0.5), 1e-6, 1e3, 16), ValidationError);
}

TEST_CASE("extension realization") {
  GridSpec g(1, 64, kPi);
  Field c = sample(g, [](double x) { return std::cos(x); });
  auto mesh = make_extension_mesh(g, FracOrder(0.5), 64);
  CHECK(mesh.size() == 64);
  CHECK(mesh.y.front() <= g.h());
  auto res = frac_laplacian_extension(c, FracOrder(0.5), mesh);
  Field spec = frac_laplacian_spectral(c, FracOrder(0.5));
  CHECK(max_diff(res.field.values, spec.values) <= 0.02 * max_abs(spec.values));
  Field z(g);
  CHECK(max_abs(frac_laplacian_extension(z, FracOrder(0.5), mesh).field.values) == 0.0);
  for (double s : {0.25, 0.75}) {
    auto m = make_extension_mesh(g, FracOrder(s));
    auto r = frac_laplacian_extension(c, FracOrder(s), m);
    Field sp = frac_laplacian_spectral(c, FracOrder(s));
    CHECK(max_diff(r.field.values, sp.values) <= 0.02 * max_abs(sp.values));
  }
  // The invariant y_1 <= h must hold for explicit meshes.
  CHECK_THROWS_AS(make_extension_mesh(g, FracOrder(0.75), 16), ValidationError);
}

TEST_CASE("quadrature realization") {
  GridSpec g(1, 256, 8.0);
  Field z(g);
  CHECK(max_abs(frac_laplacian_quadrature(z, FracOrder(0.4)).field.values) == 0.0);
  // Weights are positive, so the matrix has nonpositive off-diagonals.
  QuadratureOperator op(g, FracOrder(0.75));
  for (std::size_t j = 1; j < op.weights().size(); ++j) CHECK(op.weights()[j] > 0.0);

  GridSpec big(1, 1024, 16 * kPi);
  for (double s : {0.25, 0.5, 0.75}) {
    Field f = gaussian(big);
    Field a = frac_laplacian_spectral(f, FracOrder(s));
    Field b = frac_laplacian_quadrature(f, FracOrder(s)).field;
    CHECK(testutil::rel_err_inner(b, a, big.L / 2) <= 1e-2);
  }
}

TEST_CASE("quadrature: lowest cosine with its periodic continuation outside the box") {
  GridSpec g(1, 1024, 16 * kPi);
  auto cf = [&](double x) { return std::cos(kPi * x / g.L); };
  Field c = sample(g, cf);
  for (double s : {0.25, 0.5, 0.75}) {
    QuadratureOperator op(g, FracOrder(s));
    auto ext = op.exterior_contribution(cf);
    Field out(g);
    op.apply(c.values.data(), out.values.data(), ext.data());
    Field ref = frac_laplacian_spectral(c, FracOrder(s));
    CHECK(testutil::rel_err_inner(out, ref, g.L / 2) <= 1e-2);
  }
}

TEST_CASE("quadrature with exterior data") {
  // (-Delta)^s |x|^{-a} = kappa |x|^{-a-2s}, kappa from the Gamma-function formula.
  const double s = 0.25, a = 0.3;
  const double kappa = std::pow(2.0, 2 * s) * std::tgamma((a + 2 * s) / 2) * std::tgamma((1 - a) / 2) /
                       (std::tgamma((1 - a - 2 * s) / 2) * std::tgamma(a / 2));
  GridSpec g(1, 1024, 16.0);
  QuadratureOperator op(g, FracOrder(s));
  auto p = [a](double x) { return std::pow(std::abs(x), -a); };
  Field f = sample(g, [&](double x) { return x == 0.0 ? std::pow(g.h() / 2, -a) / (1 - a) : p(x); });
  auto ext = op.exterior_contribution(p);
  Field out(g);
  op.apply(f.values.data(), out.values.data(), ext.data());
  for (double x : {1.0, 2.0, 4.0, 8.0, -3.0}) {
    std::size_t i = static_cast<std::size_t>(std::lround((x + g.L) / g.h()));
    double got = out[i] * std::pow(std::abs(x), a + 2 * s);
    CHECK(got == doctest::Approx(kappa).epsilon(0.01));
  }
}

TEST_CASE("decay lemma weight under the quadrature operator") {
  const double s = 0.5, alpha = 3.0;
  GridSpec g(1, 2048, 128.0);
  Field w = sample(g, [alpha](double x) {
    double r = std::abs(x);
    return r <= 1.0 ? 1.0 : std::pow(1.0 + std::pow(r * r - 1.0, 4), -alpha / 8.0);
  });
  Field out = frac_laplacian_quadrature(w, FracOrder(s)).field;
  // log-log slope of |(-Delta)^s phi| on [10, L/2].
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  double c1 = INFINITY, c2 = 0;
  for (std::size_t i = 0; i < g.n; ++i) {
    double x = g.coord(i);
    if (x < 10.0 || x > g.L / 2) continue;
    double v = std::abs(out[i]);
    double lx = std::log(x), ly = std::log(v);
    sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly, ++cnt;
    double scaled = v * std::pow(x, 1 + 2 * s);
    c1 = std::min(c1, scaled);
    c2 = std::max(c2, scaled);
  }
  double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  CHECK(std::abs(slope + (1 + 2 * s)) <= 0.15);
  CHECK(c1 > 0.0);
  CHECK(c2 < INFINITY);
}

TEST_CASE("dirichlet spectral operator") {
  const std::size_t n = 63;
  auto x = dirichlet_nodes(n);
  std::vector<double> s1(n), s2(n), z(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    s1[j] = std::sin(x[j]);
    s2[j] = std::sin(2 * x[j]);
  }
  for (double s : {0.2, 0.5, 0.8}) {
    auto out = dirichlet_spectral_apply(s1, FracOrder(s));
    CHECK(max_diff(out, s1) < 1e-12);
  }
  auto out2 = dirichlet_spectral_apply(s2, FracOrder(0.5));
  for (std::size_t j = 0; j < n; ++j) CHECK(out2[j] == doctest::Approx(2 * s2[j]).scale(1.0).epsilon(1e-12));
  CHECK(max_abs(dirichlet_spectral_apply(z, FracOrder(0.3))) == 0.0);
  std::vector<double> bad(n, 0.0);
  bad[2] = NAN;
  CHECK_THROWS_AS(dirichlet_spectral_apply(bad, FracOrder(0.3)), ValidationError);
}
