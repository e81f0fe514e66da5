#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fraclap/diagnostics.hpp"
#include "fraclap/error.hpp"
#include "fraclap/exponents.hpp"
#include "fraclap/fracops.hpp"
#include "fraclap/solver.hpp"
#include "test_util.hpp"

using namespace fraclap;

namespace {
const double kPi = std::numbers::pi;

Trajectory synthetic(const GridSpec& g, const std::vector<double>& times,
                     const std::function<double(double, double)>& u) {
  Trajectory tr;
  for (double t : times) {
    tr.snapshots.push_back({t, sample(g, [&](double x) { return u(x, t); })});
    auto nm = norms(tr.snapshots.back().u, 0.5);
    tr.diagnostics.push_back({t, 0.0, nm.mass, nm.l2, nm.l4, nm.linf, nm.min, nm.energy});
  }
  return tr;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}
}  // namespace

TEST_CASE("norms") {
  GridSpec g(1, 128, kPi);
  Field zero(g);
  auto z = norms(zero, 0.5);
  CHECK(z.mass == 0.0);
  CHECK(z.l2 == 0.0);
  CHECK(z.linf == 0.0);
  CHECK(z.energy == 0.0);

  for (double s : {0.25, 0.5, 0.75}) {
    for (int k : {1, 5, 20}) {
      Field c = sample(g, [k](double x) { return std::cos(k * x); });
      auto nm = norms(c, s);
      CHECK(nm.energy == doctest::Approx(std::pow(k, 2.0 * s) * nm.l2 * nm.l2).epsilon(1e-12));
      CHECK(nm.l2 * nm.l2 == doctest::Approx(kPi).epsilon(1e-12));
      CHECK(std::abs(nm.mass) < 1e-12);
    }
  }

  // Energy as the squared norm of two half-order applications.
  std::mt19937_64 rng(2);
  for (double s : {0.3, 0.5, 0.8}) {
    auto u = testutil::band_limited(g, 30, rng, true);
    auto half = frac_laplacian_spectral(u, FracOrder(s / 2));
    const double split = testutil::dot(half.values, half.values) * g.h();
    CHECK(norms(u, s).energy == doctest::Approx(split).epsilon(1e-12));
  }

  Field f = sample(g, [](double x) { return x; });
  CHECK(lp_norm(f, INFINITY) == doctest::Approx(kPi));
  CHECK(lp_norm(f, 1.0) == doctest::Approx(norms(f, 0.5).l1));
  CHECK_THROWS_AS(lp_norm(f, 0.5), ValidationError);
}

TEST_CASE("linear fit and window length") {
  auto x = linspace(0.0, 1.0, 10);
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * v - 1.0);
  auto f = linear_fit(x, y);
  CHECK(f.slope == doctest::Approx(3.0));
  CHECK(f.intercept == doctest::Approx(-1.0));
  CHECK(f.residual < 1e-14);
  CHECK(f.points() == 10);
  CHECK_THROWS_AS(linear_fit(x, y, 0, 6), NumericalError);
}

TEST_CASE("auto window") {
  // Slope -1 for x < 0, slope -3 beyond; the longer piece wins.
  auto x = linspace(-1.0, 3.0, 41);
  std::vector<double> y;
  for (double v : x) y.push_back(v < 0.0 ? -v : -3.0 * v);
  auto w = auto_window(x, y);
  REQUIRE(w);
  auto f = linear_fit(x, y, w->first, w->second);
  CHECK(f.slope == doctest::Approx(-3.0));
  CHECK(w->second == 40);
  CHECK(w->second - w->first + 1 >= 8);
  std::vector<double> noisy(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) noisy[i] = (i % 2 ? 1.0 : -1.0) * x[i];
  CHECK_FALSE(auto_window(x, noisy));
}

TEST_CASE("tail fitter calibration on closed-form profiles") {
  // Grid spacing 1, window [8, 32] grid lengths.
  GridSpec g(1, 256, 128.0);
  CHECK(g.h() == 1.0);
  SUBCASE("Poisson kernel") {
    Field u = sample(g, [](double x) { return linear_kernel_eval(x, 1.0); });
    auto f = tail_exponent_fit(u, 8.0, 32.0);
    CHECK(std::abs(f.slope + 2.0) <= 0.05);
    CHECK(f.residual < 0.1);
  }
  SUBCASE("explicit profiles") {
    for (double s : {0.25, 0.5, 0.75}) {
      const double k = (1.0 + 2.0 * s) / 2.0;
      Field u = sample(g, [k](double x) { return std::pow(1.0 + x * x, -k); });
      CHECK(std::abs(tail_exponent_fit(u, 8.0, 32.0).slope + 2.0 * k) <= 0.05);
    }
  }
  SUBCASE("extinction profile") {
    ModelParams p{1, 0.3, 0.25, {}, {}};
    const double q = extinction_space_exponent(p);
    Field u = sample(g, [&](double x) { return x == 0.0 ? 1.0 : extinction_solution_eval(x, 0.0, 1.0, 1.0, p); });
    CHECK(std::abs(tail_exponent_fit(u, 8.0, 32.0).slope + q) <= 0.05);
    CHECK(std::abs(tail_exponent_fit_auto(u, 8.0, 32.0).slope + q) <= 1e-10);
  }
  Field neg = sample(g, [](double x) { return -1.0 - x * x; });
  CHECK_THROWS_AS(tail_exponent_fit(neg, 8.0, 32.0), NumericalError);
  CHECK_THROWS_AS(tail_exponent_fit(neg, 8.0, 100.0), ValidationError);
}

TEST_CASE("decay rate fit") {
  std::vector<double> t, q;
  for (int i = 1; i <= 2000; ++i) {
    t.push_back(0.01 * i);
    q.push_back(3.0 * std::pow(0.01 * i, -0.5));
  }
  auto f = decay_rate_fit(t, q, 1.0, 20.0);
  CHECK(f.slope == doctest::Approx(-0.5).epsilon(1e-10));
  CHECK(f.points() >= 8);
  CHECK_THROWS_AS(decay_rate_fit(t, q, 30.0, 40.0), NumericalError);
}

TEST_CASE("weighted mass") {
  GridSpec g(1, 512, 32.0);
  Field zero(g);
  CHECK(weighted_mass(zero, 1.0, 4.0, 0.3, 0.25) == 0.0);
  CHECK(lemma_weight(0.5, 1.0, 1.0) == 1.0);
  CHECK(lemma_weight(3.0, 1.0, 1.0) < 1.0);
  auto band = weight_alpha_band(1, 0.3, 0.25);
  CHECK(band.first == doctest::Approx(1.0 - 0.5 / 0.7));
  CHECK(band.second == doctest::Approx(1.0 + 0.5 / 0.3));
  CHECK_THROWS_AS(weighted_mass(zero, 3.0, 4.0, 0.3, 0.25), ValidationError);
  CHECK_THROWS_AS(weighted_mass(zero, 0.1, 4.0, 0.3, 0.25), ValidationError);

  // A field supported well inside R = L/2: the weight is 1 on its support.
  Field u = sample(g, [](double x) { return std::exp(-x * x); });
  double mass = norms(u, 0.5).mass;
  CHECK(weighted_mass(u, 1.5, g.L / 2, 0.3, 0.25) == doctest::Approx(mass).epsilon(1e-14));
  // Weighted mass grows with R toward the plain mass.
  Field wide = sample(g, [](double x) { return 1.0 / (1.0 + x * x); });
  const double m_wide = norms(wide, 0.5).mass;
  double prev = 0.0;
  for (double R : {1.0, 2.0, 4.0, 8.0, 16.0}) {
    const double w = weighted_mass(wide, 1.5, R, 0.3, 0.25);
    CHECK(w > prev);
    CHECK(w <= m_wide);
    prev = w;
  }
}

TEST_CASE("Barenblatt error and self profile") {
  GridSpec g(1, 512, 32.0);
  const double a = 0.5, b = 0.5;
  auto F = [](double y) { return 1.0 / (kPi * (1.0 + y * y)); };
  auto tr = synthetic(g, {1.0, 2.0, 4.0, 8.0}, [&](double x, double t) {
    return std::pow(t, -a) * F(std::abs(x) * std::pow(t, -b));
  });
  auto es = barenblatt_error(tr, F, a, b);
  CHECK(es.t.size() == 4);
  for (double e : es.err) CHECK(e < 1e-14);

  auto prof = self_profile(tr.snapshots[2].u, 4.0, a, b);
  for (double y : {0.0, 0.3, 1.0, 3.0}) CHECK(prof(y) == doctest::Approx(F(y)).epsilon(1e-3));
  CHECK_THROWS_AS(barenblatt_error(tr, {}, a, b), ValidationError);

  ErrorSeries down{{1, 2, 3}, {1.0, 0.5, 0.1}};
  CHECK(down.decreasing());
  CHECK(down.final_ratio() == doctest::Approx(0.1));
}

TEST_CASE("front radius and rate fits") {
  GridSpec g(1, 2048, 400.0);
  const double sigma = 0.3;
  auto tr = synthetic(g, linspace(1.0, 12.0, 23), [&](double x, double t) {
    const double z = std::abs(x) * std::exp(-sigma * t);
    return 1.0 / (1.0 + z * z);
  });
  auto fs = front_radius(tr, 0.5);
  CHECK_FALSE(fs.reached_edge);
  for (std::size_t i = 0; i < fs.t.size(); ++i)
    CHECK(std::abs(fs.radius[i] - std::exp(sigma * fs.t[i])) <= 0.05 * g.h());
  auto fe = front_rate_fit(fs, 2.0, 12.0);
  CHECK(fe.slope == doctest::Approx(sigma).epsilon(1e-3));
  auto fl = front_linear_fit(fs, 2.0, 12.0);
  CHECK(fl.residual > fe.residual);
  CHECK_THROWS_AS(front_radius(tr.snapshots[0].u, 1.5), ValidationError);
  CHECK(std::isnan(front_radius(tr.snapshots[0].u, 0.99999999)) == false);
  Field low = sample(g, [](double) { return 0.1; });
  CHECK(std::isnan(front_radius(low, 0.5)));
}

TEST_CASE("extinction bracket and box edge ratio") {
  Trajectory tr;
  CHECK_THROWS_AS(extinction_time(tr), NumericalError);
  tr.extinction = std::make_pair(0.9, 1.1);
  CHECK(extinction_time(tr).first == 0.9);

  GridSpec g(1, 64, 8.0);
  Field u = sample(g, [](double x) { return std::exp(-x * x); });
  CHECK(box_edge_ratio(u) < 1e-6);
  Field v = sample(g, [](double x) { return 1.0 / (1.0 + x * x); });
  CHECK(box_edge_ratio(v) > 1e-6);
}
