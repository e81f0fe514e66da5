#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "doctest.h"
#include "fraclap/config.hpp"
#include "fraclap/error.hpp"

using namespace fraclap;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {
double total(const Field& u) { return std::accumulate(u.values.begin(), u.values.end(), 0.0) * u.grid.cell_volume(); }

RunConfig random_config(std::mt19937_64& rng) {
  auto pick = [&](std::initializer_list<const char*> xs) { return std::string(*(xs.begin() + rng() % xs.size())); };
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RunConfig c;
  c.id = "r" + std::to_string(rng() % 1000);
  c.grid = GridSpec(1 + static_cast<int>(rng() % 2), 8 * (1 + rng() % 16), 1.0 + 50.0 * u(rng));
  c.m = 0.1 + 3.0 * u(rng);
  c.s = 0.05 + 0.9 * u(rng);
  c.nonlinearity = pick({"power", "logarithmic"});
  c.reaction = pick({"none", "kpp"});
  c.op = pick({"spectral", "quadrature", "semigroup", "extension"});
  c.window.t_min = u(rng) * 1e-5;
  c.window.nodes = 16 + static_cast<int>(rng() % 300);
  c.extension_nodes = rng() % 4096;
  c.scheme = pick({"explicit", "imex-linear", "semi-implicit"});
  c.t_end = 0.1 + 100.0 * u(rng);
  c.dt_max = rng() % 2 ? std::numeric_limits<double>::infinity() : u(rng);
  c.dealias = rng() % 2;
  c.snapshots.spacing = pick({"log", "linear", "list"});
  if (c.snapshots.spacing == "list") c.snapshots.times = {u(rng), 1.0 + u(rng)};
  else c.snapshots.count = static_cast<int>(rng() % 50);
  c.initial.kind = pick({"gaussian", "indicator", "explicit-profile", "custom-table", "random-bumps"});
  c.initial.mass = u(rng);
  c.initial.radius = u(rng);
  c.initial.profile = "huang";
  c.initial.params = {{"t0", u(rng)}, {"mass", 1.0 / 3.0}};
  c.initial.path = "tables/x.csv";
  c.initial.count = 1 + static_cast<int>(rng() % 9);
  c.seed = rng();
  if (rng() % 2) c.analysis.decay_window = std::make_pair(u(rng), 2.0 + u(rng));
  c.outputs.snapshots_csv = rng() % 2;
  if (rng() % 2) c.operator_check = OperatorCheckSpec{{"gaussian"}, 0.25, {{"spectral", "semigroup", 0.3, 1e-4}}};
  return c;
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("fraclap_test_config_" + std::to_string(::getpid())) / name;
  fs::create_directories(p.parent_path());
  return p;
}
}  // namespace

TEST_CASE("parse after emit is the identity on random configs") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 200; ++i) {
    RunConfig c = random_config(rng);
    const json j = emit_config(c);
    RunConfig back = parse_config(json::parse(j.dump()));
    CHECK(back == c);
    CHECK(emit_config(back) == j);
  }
}

TEST_CASE("shipped configs parse, validate and round trip") {
  for (const auto& e : fs::directory_iterator(fs::path(FRACLAP_SOURCE_DIR) / "configs")) {
    CAPTURE(e.path().string());
    RunConfig c = load_config(e.path());
    CHECK_NOTHROW(c.validate());
    CHECK(parse_config(emit_config(c)) == c);
  }
}

TEST_CASE("config validation") {
  json base = {{"id", "t"}, {"grid", {{"dim", 1}, {"n", 64}, {"L", 8}}}};
  auto with = [&](const json& patch) {
    json j = base;
    j.merge_patch(patch);
    return parse_config(j);
  };
  CHECK_NOTHROW(with(json::object()).validate());
  CHECK_THROWS_AS(with({{"model", {{"s", 0.99}}}}).validate(), ValidationError);
  CHECK_THROWS_AS(with({{"bogus", 1}}), ValidationError);
  CHECK_THROWS_AS(with({{"grid", {{"n", "many"}}}}), ValidationError);
  CHECK_THROWS_AS(with({{"grid", {{"n", 63}}}}).validate(), ValidationError);
  CHECK_NOTHROW(with({{"grid", {{"n", 63}}}, {"operator", {{"kind", "dirichlet"}}}}).validate());
  CHECK_THROWS_AS(with({{"operator", {{"kind", "fourier"}}}}).validate(), ValidationError);
  CHECK_THROWS_AS(with({{"operator", {{"exterior", "profile"}}}}).validate(), ValidationError);
  CHECK_THROWS_AS(with({{"initial_data", {{"kind", "gaussian"}, {"radius", 1}}}}), ValidationError);
  CHECK_THROWS_AS(with({{"initial_data", {{"kind", "explicit-profile"}, {"profile", "x"}}}}).validate(),
                  ValidationError);
  CHECK_THROWS_AS(with({{"id", "../x"}}).validate(), ValidationError);
  CHECK_THROWS_AS(with({{"analysis", {{"decay_window", {2, 1}}}}}).validate(), ValidationError);
  CHECK_THROWS_AS(
      with({{"operator_check", {{"pairs", {{{"reference", "spectral"}, {"candidate", "quadrature"}, {"s", 0.99}}}}}}})
          .validate(),
      ValidationError);
  CHECK(std::isinf(with({{"scheme", {{"dt_max", nullptr}}}}).dt_max));
}

TEST_CASE("snapshot plans") {
  SnapshotPlan p;
  p.spacing = "log";
  p.from = 0.1;
  p.count = 3;
  auto t = p.resolve(10.0);
  REQUIRE(t.size() == 3);
  CHECK(t[1] == doctest::Approx(1.0));
  CHECK(t[2] == 10.0);
  p.spacing = "linear";
  p.from = 0.0;
  p.count = 4;
  t = p.resolve(2.0);
  CHECK(t.front() == doctest::Approx(0.5));
  CHECK(t.back() == 2.0);
  p.count = 0;
  CHECK(p.resolve(1.0).empty());
}

TEST_CASE("initial-data recipes") {
  RunConfig c;
  c.grid = GridSpec(1, 512, 16.0);
  c.initial.kind = "gaussian";
  c.initial.mass = 2.0;
  c.initial.width = 0.5;
  CHECK(total(initial_field(c)) == doctest::Approx(2.0).epsilon(1e-10));

  c.initial.kind = "indicator";
  c.initial.radius = 2.0;
  c.initial.height = 3.0;
  Field ind = initial_field(c);
  CHECK(std::abs(total(ind) - 12.0) <= 3.0 * c.grid.h() * 1.0001);

  c.initial.kind = "random-bumps";
  c.initial.count = 4;
  c.seed = 7;
  Field a = initial_field(c), b = initial_field(c);
  CHECK(a.values == b.values);
  c.seed = 8;
  CHECK(initial_field(c).values != a.values);

  c.initial.kind = "custom-table";
  auto table = scratch("tables/ramp.csv");
  std::ofstream(table) << "x,u\n-1,0\n0,1\n1,0\n";
  c.base_dir = table.parent_path().parent_path();
  c.initial.path = "tables/ramp.csv";
  Field tent = initial_field(c);
  CHECK(total(tent) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(tent[c.grid.n / 2] == 1.0);

  c.initial.kind = "explicit-profile";
  c.initial.profile = "linear-kernel";
  c.initial.params = {{"t0", 1.0}, {"mass", 1.0}};
  c.s = 0.5;
  c.grid = GridSpec(1, 2048, 512.0);
  CHECK(total(initial_field(c)) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("Dirichlet recipes sample the interior nodes") {
  RunConfig c;
  c.op = "dirichlet";
  c.grid.n = 63;
  c.initial.kind = "indicator";
  c.initial.center = M_PI / 2;
  c.initial.radius = 0.5;
  auto u = initial_dirichlet(c);
  CHECK(u.size() == 63);
  CHECK(u[31] == 1.0);
  CHECK(u[0] == 0.0);
  CHECK_THROWS_AS(initial_field(c), ValidationError);
}
