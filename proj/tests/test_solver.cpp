#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fraclap/diagnostics.hpp"
#include "fraclap/error.hpp"
#include "fraclap/exponents.hpp"
#include "fraclap/solver.hpp"
#include "test_util.hpp"

using namespace fraclap;
using testutil::max_abs;
using testutil::max_diff;

namespace {
const double kPi = std::numbers::pi;

OperatorSpec spectral_op(double s) {
  OperatorSpec op;
  op.s = s;
  return op;
}

SolverConfig config(double s, double t_end, Scheme scheme = Scheme::explicit_euler) {
  SolverConfig cfg;
  cfg.op = spectral_op(s);
  cfg.scheme = scheme;
  cfg.t_end = t_end;
  return cfg;
}

Field bump(const GridSpec& g, double center, double radius, double height) {
  return sample(g, [=](double x) {
    const double d = std::abs(x - center) / radius;
    return d < 1.0 ? height * (1.0 - d * d) * (1.0 - d * d) : 0.0;
  });
}

Field random_bumps(const GridSpec& g, std::mt19937_64& rng, int count) {
  std::uniform_real_distribution<double> c(-g.L / 3, g.L / 3), r(0.5, 2.0), a(0.2, 1.0);
  Field f(g);
  for (int k = 0; k < count; ++k) {
    auto b = bump(g, c(rng), r(rng), a(rng));
    for (std::size_t i = 0; i < f.size(); ++i) f[i] += b[i];
  }
  return f;
}

double positive_part_integral(const Field& u, const Field& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += std::max(u[i] - v[i], 0.0);
  return s * u.grid.h();
}
}  // namespace

TEST_CASE("nonlinearity conventions") {
  auto p = Nonlinearity::power(0.5);
  CHECK(p.phi(0.0) == 0.0);
  CHECK(p.phi(-4.0) == doctest::Approx(-2.0));
  CHECK(p.dphi(4.0) == doctest::Approx(0.25));
  CHECK(std::isfinite(p.dphi(0.0)));
  auto lg = Nonlinearity::logarithmic();
  CHECK(lg.phi(0.0) == 0.0);
  CHECK(lg.dphi(1.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(Nonlinearity::power(-1.0), ValidationError);
  CHECK_THROWS_AS(Nonlinearity::custom([](double u) { return u + 1.0; }, [](double) { return 1.0; }),
                  ValidationError);
  auto r = Reaction::kpp();
  CHECK(r.eval(0.0) == 0.0);
  CHECK(r.eval(1.0) == 0.0);
  CHECK(r.fprime0 == 1.0);
  CHECK_THROWS_AS(Reaction::custom([](double u) { return u * u * (1.0 - u); }, 1.0), ValidationError);
  CHECK_NOTHROW(Reaction::custom([](double u) { return u * (1.0 - u) * (1.0 + u); }, 1.0));
}

TEST_CASE("solver config validation") {
  auto cfg = config(0.5, 1.0);
  cfg.c_cfl = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = config(0.5, -1.0);
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = config(0.5, 1.0);
  cfg.snapshot_times = {0.5, 0.2};
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = config(0.99, 1.0);
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = config(0.5, 1.0);
  cfg.exterior = ExteriorData{[](double) { return 0.0; }, [](double) { return 0.0; }};
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("explicit step examples") {
  GridSpec g(1, 64, kPi);
  const double dt = 1e-3;
  auto nl2 = Nonlinearity::power(2.0);
  Field zero(g);
  CHECK(max_abs(step_explicit(zero, dt, nl2, Reaction::none(), spectral_op(0.5)).values) == 0.0);

  Field one = sample(g, [](double) { return 1.0; });
  for (double m : {0.5, 1.0, 2.0}) {
    auto out = step_explicit(one, dt, Nonlinearity::power(m), Reaction::kpp(), spectral_op(0.4));
    CHECK(max_diff(out.values, one.values) < 1e-14);
  }

  for (double s : {0.25, 0.5, 0.75}) {
    for (int k : {1, 3, 8}) {
      Field c = sample(g, [k](double x) { return std::cos(k * x); });
      auto out = step_explicit(c, dt, Nonlinearity::power(1.0), Reaction::none(), spectral_op(s));
      const double f = 1.0 - dt * std::pow(k, 2.0 * s);
      for (std::size_t i = 0; i < g.n; ++i) CHECK(out[i] == doctest::Approx(f * c[i]).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("explicit step CFL guard") {
  GridSpec g(1, 64, kPi);
  Field c = sample(g, [](double x) { return 1.0 + 0.5 * std::cos(x); });
  auto nl = Nonlinearity::power(2.0);
  const double limit = 0.2 * std::pow(g.h(), 1.0) / 3.0;
  CHECK_NOTHROW(step_explicit(c, 0.9 * limit, nl, Reaction::none(), spectral_op(0.5)));
  CHECK_THROWS_AS(step_explicit(c, 1.5 * limit, nl, Reaction::none(), spectral_op(0.5)), ValidationError);
}

TEST_CASE("imex step") {
  GridSpec g(1, 64, kPi);
  for (int k : {1, 4}) {
    Field c = sample(g, [k](double x) { return std::cos(k * x); });
    const double dt = 0.05, s = 0.6;
    auto out = step_imex_linear(c, dt, s);
    const double f = 1.0 / (1.0 + dt * std::pow(k, 2.0 * s));
    CHECK(max_diff(out.values, sample(g, [&](double x) { return f * std::cos(k * x); }).values) < 1e-13);
  }
  Field one = sample(g, [](double) { return 3.0; });
  CHECK(max_diff(step_imex_linear(one, 0.1, 0.5).values, one.values) < 1e-13);
  Field half = sample(g, [](double) { return 1.0; });
  CHECK(max_diff(step_imex_linear(half, 0.1, 0.5, Reaction::kpp()).values, half.values) < 1e-13);

  // One-step maps agree to O(dt^2): the gap shrinks 100x when dt shrinks 10x.
  std::mt19937_64 rng(7);
  auto u = testutil::band_limited(g, 6, rng, true);
  auto gap = [&](double dt) {
    auto a = step_imex_linear(u, dt, 0.5);
    auto b = step_explicit(u, dt, Nonlinearity::power(1.0), Reaction::none(), spectral_op(0.5));
    return max_diff(a.values, b.values);
  };
  const double r = gap(1e-3) / gap(1e-4);
  CHECK(r == doctest::Approx(100.0).epsilon(0.05));

  auto cfg = config(0.5, 0.1, Scheme::imex_linear);
  cfg.dt_max = 0.01;
  CHECK_THROWS_AS(solve(u, Nonlinearity::power(2.0), Reaction::none(), cfg), ValidationError);
}

TEST_CASE("trajectory structure") {
  GridSpec g(1, 128, 8.0);
  Field u0 = bump(g, 0.0, 2.0, 1.0);
  auto cfg = config(0.5, 0.3);
  cfg.snapshot_times = {0.0, 0.1, 0.2};
  std::size_t calls = 0;
  auto tr = solve(u0, Nonlinearity::power(2.0), Reaction::none(), cfg, [&](double, const Field&) { ++calls; });
  REQUIRE(tr.snapshots.size() == 4);
  CHECK(tr.snapshots[1].t == 0.1);
  CHECK(tr.snapshots[2].t == 0.2);
  CHECK(tr.snapshots[3].t == 0.3);
  CHECK(tr.diagnostics.size() == tr.steps + 1);
  CHECK(calls == tr.steps + 1);
  for (std::size_t i = 1; i < tr.diagnostics.size(); ++i) CHECK(tr.diagnostics[i].t > tr.diagnostics[i - 1].t);
  CHECK(tr.meta.at("dealias") == "off");
  CHECK_THROWS_AS(extinction_time(tr), NumericalError);
}

TEST_CASE("linear evolution of a narrow Gaussian matches the explicit kernel") {
  GridSpec g(1, 1024, 16.0);
  const double w = 4.0 * g.h();
  Field u0 = sample(g, [w](double x) { return std::exp(-x * x / (2 * w * w)) / (w * std::sqrt(2 * kPi)); });
  auto cfg = config(0.5, 1.0, Scheme::imex_linear);
  cfg.dt_max = 1e-3;
  auto tr = solve(u0, Nonlinearity::power(1.0), Reaction::none(), cfg);
  Field ref = sample(g, [](double x) { return linear_kernel_eval(x, 1.0); });
  CHECK(testutil::rel_err_inner(tr.snapshots.back().u, ref, g.L / 2) < 0.02);
}

TEST_CASE("mass conservation and Lp monotonicity") {
  GridSpec g(1, 256, 16.0);
  std::mt19937_64 rng(11);
  for (double m : {2.0, 1.0, 0.75}) {
    Field u0 = random_bumps(g, rng, 3);
    for (auto& v : u0.values) v += 0.05;  // keeps phi' bounded for m < 1
    auto cfg = config(0.5, 0.5);
    auto tr = solve(u0, Nonlinearity::power(m), Reaction::none(), cfg);
    const auto& d = tr.diagnostics;
    const double drift = std::abs(d.back().mass - d.front().mass) / d.front().mass / cfg.t_end;
    CHECK(drift <= 1e-8);
    bool mono = true;
    for (std::size_t i = 1; i < d.size(); ++i) {
      auto grew = [](double a, double b) { return b > a * (1.0 + 1e-10); };
      mono &= !grew(d[i - 1].l2, d[i].l2) && !grew(d[i - 1].l4, d[i].l4) && !grew(d[i - 1].linf, d[i].linf);
    }
    CHECK(mono);
  }
}

TEST_CASE("L1 contraction and order preservation on ordered pairs") {
  GridSpec g(1, 256, 16.0);
  std::mt19937_64 rng(3);
  for (int pair = 0; pair < 5; ++pair) {
    Field v0 = random_bumps(g, rng, 2);
    Field u0 = v0;
    auto extra = random_bumps(g, rng, 2);
    for (std::size_t i = 0; i < u0.size(); ++i) u0[i] += extra[i];
    auto cfg = config(0.5, 0.4);
    cfg.snapshot_times = {0.05, 0.1, 0.2, 0.3};
    cfg.dt_max = 2e-3;  // identical step sequences for both runs
    const double dt_u = cfg.c_cfl * g.h() / (2.0 * max_abs(u0.values));
    cfg.dt_max = std::min(cfg.dt_max, dt_u);
    auto nl = Nonlinearity::power(2.0);
    auto tu = solve(u0, nl, Reaction::none(), cfg);
    auto tv = solve(v0, nl, Reaction::none(), cfg);
    REQUIRE(tu.snapshots.size() == tv.snapshots.size());
    double prev = INFINITY;
    for (std::size_t k = 0; k < tu.snapshots.size(); ++k) {
      const auto& u = tu.snapshots[k].u;
      const auto& v = tv.snapshots[k].u;
      double worst = INFINITY;
      for (std::size_t i = 0; i < u.size(); ++i) worst = std::min(worst, u[i] - v[i]);
      CHECK(worst >= -1e-10);
      const double c = positive_part_integral(u, v);
      CHECK(c <= prev * (1.0 + 1e-10));
      prev = c;
    }
  }
}

TEST_CASE("positivity from compact data") {
  GridSpec g(1, 256, 8.0);
  Field u0 = bump(g, 0.0, 1.0, 1.0);
  struct Case {
    double m, s;
    Scheme scheme;
  };
  for (auto c : {Case{2.0, 0.5, Scheme::explicit_euler}, Case{1.0, 0.25, Scheme::explicit_euler},
                 Case{0.75, 0.5, Scheme::semi_implicit}}) {
    auto cfg = config(c.s, 0.1, c.scheme);
    auto tr = solve(u0, Nonlinearity::power(c.m), Reaction::none(), cfg);
    CHECK(tr.diagnostics.back().min > 0.0);
    bool pos = true;
    for (std::size_t i = 1; i < tr.diagnostics.size(); ++i) pos &= tr.diagnostics[i].min > 0.0;
    CHECK(pos);
  }
}

TEST_CASE("restart at an intermediate time") {
  GridSpec g(1, 128, 8.0);
  Field u0 = bump(g, 0.5, 2.0, 1.0);
  auto nl = Nonlinearity::power(2.0);
  auto cfg = config(0.5, 0.25);
  auto straight = solve(u0, nl, Reaction::none(), cfg);
  cfg.t_end = 0.1;
  auto first = solve(u0, nl, Reaction::none(), cfg);
  cfg.t_end = 0.15;
  auto second = solve(first.snapshots.back().u, nl, Reaction::none(), cfg);
  const double diff = max_diff(second.snapshots.back().u.values, straight.snapshots.back().u.values);
  // Local error of one step: one full step against two half steps.
  const double dt = straight.diagnostics[1].dt;
  auto full = step_explicit(u0, dt, nl, Reaction::none(), spectral_op(0.5));
  auto half = step_explicit(u0, dt / 2, nl, Reaction::none(), spectral_op(0.5));
  half = step_explicit(half, dt / 2, nl, Reaction::none(), spectral_op(0.5));
  const double local = 2.0 * max_diff(full.values, half.values);
  CHECK(diff <= 10.0 * local);
}

TEST_CASE("fast diffusion below m_c extinguishes") {
  GridSpec g(1, 128, 8.0);
  Field u0 = bump(g, 0.0, 2.0, 1.0);
  SolverConfig cfg;
  cfg.op.kind = OperatorKind::quadrature;
  cfg.op.s = 0.25;
  cfg.scheme = Scheme::semi_implicit;
  cfg.t_end = 100.0;
  auto tr = solve(u0, Nonlinearity::power(0.3), Reaction::none(), cfg);
  auto [lo, hi] = extinction_time(tr);
  CHECK(lo < hi);
  CHECK(hi < 100.0);
  CHECK(tr.diagnostics.back().linf < 1e-10);

  // Smaller data extinguish earlier.
  Field small = u0;
  for (auto& v : small.values) v *= 0.1;
  auto ts = solve(small, Nonlinearity::power(0.3), Reaction::none(), cfg);
  CHECK(extinction_time(ts).second < lo);

  // Zero data are extinct from the start instead of deadlocking on phi'(0).
  auto tz = solve(Field(g), Nonlinearity::power(0.3), Reaction::none(), cfg);
  CHECK(extinction_time(tz).second == 0.0);
  CHECK(tz.steps == 0);
}

TEST_CASE("blow-up guard and CFL deadlock") {
  GridSpec g(1, 64, kPi);
  auto cfg = config(0.5, 1.0);
  cfg.dt_max = 1e-3;
  auto grow = Reaction::custom([](double u) { return 4.0 * u * (1.0 - u); }, 4.0);
  Field big = sample(g, [](double x) { return 0.5 + 0.1 * std::cos(x); });
  cfg.blowup_ceiling = 0.6;
  CHECK_THROWS_AS(solve(big, Nonlinearity::power(1.0), grow, cfg), BlowUpError);

  auto cfg2 = config(0.5, 1.0);
  cfg2.dt_min = 1e-3;
  Field tall = sample(g, [](double x) { return 100.0 + std::cos(x); });
  CHECK_THROWS_AS(solve(tall, Nonlinearity::power(2.0), Reaction::none(), cfg2), CflDeadlockError);
}

TEST_CASE("Dirichlet run") {
  const std::size_t n = 127;
  const double m = 2.0;
  auto x = dirichlet_nodes(n);
  std::vector<double> u0(n);
  for (std::size_t j = 0; j < n; ++j) u0[j] = std::pow(dirichlet_phi1(x[j]), 1.0 / m);
  SolverConfig cfg;
  cfg.op.kind = OperatorKind::dirichlet;
  cfg.op.s = 0.5;
  cfg.t_end = 2.0;
  cfg.snapshot_times = {1.0};
  auto tr = solve_dirichlet(u0, Nonlinearity::power(m), cfg);
  const auto& r0 = tr.snapshots.front().ratio;
  CHECK(*std::max_element(r0.begin(), r0.end()) - *std::min_element(r0.begin(), r0.end()) < 1e-12);
  CHECK(tr.snapshots.size() == 3);
  CHECK(tr.diagnostics.back().sup < tr.diagnostics.front().sup);
  CHECK(tr.diagnostics.back().weighted_mass > 0.0);
  CHECK_THROWS_AS(solve_dirichlet(u0, Nonlinearity::power(0.5), cfg), ValidationError);
  cfg.op.kind = OperatorKind::spectral;
  CHECK_THROWS_AS(solve_dirichlet(u0, Nonlinearity::power(m), cfg), ValidationError);
}
