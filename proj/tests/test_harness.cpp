#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "gnls/config.hpp"
#include "gnls/errors.hpp"
#include "gnls/experiment.hpp"
#include "gnls/io.hpp"
#include "support/support.hpp"

using namespace gnls;
using namespace gnls::test;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("gnls_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Series {
  std::vector<double> t, d, se;
};

Series exponential(double rate, double rel_noise, double abs_noise, Rng& rng, int points = 200) {
  Series s;
  const double horizon = 8 / rate;
  for (int i = 0; i < points; ++i) {
    const double t = horizon * i / (points - 1);
    const double clean = std::exp(-rate * t);
    s.t.push_back(t);
    s.d.push_back(clean * (1 + rel_noise * rng.normal()) + abs_noise * rng.normal());
    s.se.push_back(std::hypot(rel_noise * clean, abs_noise));
  }
  return s;
}

}  // namespace

TEST_CASE("decay fits") {
  Rng rng(71);
  SUBCASE("noiseless exponential") {
    std::vector<double> t, d;
    for (int i = 0; i < 100; ++i) {
      t.push_back(0.05 * i);
      d.push_back(3 * std::exp(-2 * t.back()));
    }
    const auto fit = estimate_decay_rate(t, d, {});
    REQUIRE(fit.determinate);
    CHECK(fit.rate == doctest::Approx(2).epsilon(1e-10));
    CHECK(fit.t_lo >= 0.1 * t.back() - 1e-12);
    CHECK(fit.t_lo + 2 / 2.0 >= fit.t_hi - 0.05 - 1e-12);
  }
  SUBCASE("small additive noise") {
    for (int rep = 0; rep < 20; ++rep) {
      const auto s = exponential(2, 0, 1e-4, rng);
      const auto fit = estimate_decay_rate(s.t, s.d, s.se);
      REQUIRE(fit.determinate);
      CHECK(fit.rate_stderr >= 0);
      CHECK(std::abs(fit.rate - 2) <= 3 * fit.rate_stderr);
    }
  }
  SUBCASE("calibration across rates") {
    for (double rate : {0.1, 1.0, 10.0})
      for (int rep = 0; rep < 10; ++rep) {
        const auto s = exponential(rate, 0.01, 0, rng);
        const auto fit = estimate_decay_rate(s.t, s.d, s.se);
        REQUIRE(fit.determinate);
        CHECK(std::abs(fit.rate - rate) < 0.02 * rate);
      }
  }
  SUBCASE("no decay") {
    std::vector<double> t, d(50, 0.7), se(50, 0.01);
    for (int i = 0; i < 50; ++i) t.push_back(i * 0.1);
    const auto fit = estimate_decay_rate(t, d, se);
    CHECK_FALSE(fit.determinate);
    CHECK_FALSE(fit.reason.empty());
  }
  SUBCASE("pure noise") {
    std::vector<double> t, d, se;
    for (int i = 0; i < 80; ++i) {
      t.push_back(i * 0.1);
      d.push_back(0.01 * rng.normal());
      se.push_back(0.01);
    }
    CHECK_FALSE(estimate_decay_rate(t, d, se).determinate);
  }
  SUBCASE("fixed window matches a hand least-squares fit") {
    std::vector<double> t{0, 1, 2, 3}, d{1, 0.5, 0.3, 0.1};
    const auto fit = fit_window(t, d, {}, 0, 3);
    double xm = 1.5, ym = 0, sxy = 0, sxx = 0;
    for (double v : d) ym += std::log(v) / 4;
    for (int i = 0; i < 4; ++i) {
      sxy += (t[i] - xm) * (std::log(d[i]) - ym);
      sxx += (t[i] - xm) * (t[i] - xm);
    }
    CHECK(fit.rate == doctest::Approx(-sxy / sxx).epsilon(1e-12));
  }
}

TEST_CASE("deviation series") {
  DeviationData one;
  one.t = {0, 1};
  one.x = {{{3, 2}, {5, 2}}};
  one.eq = {1};
  one.eq_se = {0};
  auto dev = deviation_series(one);
  CHECK(dev.d[0] == 3);
  CHECK(dev.d[1] == 1);
  CHECK(dev.se[0] == doctest::Approx(1.0));

  // Starting below equilibrium flips the sign so the series starts positive.
  one.eq = {6};
  dev = deviation_series(one);
  CHECK(dev.d[0] == 2);
  CHECK(dev.d[1] == 4);

  DeviationData two;
  two.t = {0};
  two.x = {{{3}, {3}}, {{4}, {4}}};
  two.eq = {0, 0};
  two.eq_se = {0, 0};
  CHECK(deviation_series(two).d[0] == doctest::Approx(5));
}

TEST_CASE("mean relaxation of the free dynamics") {
  for (auto [beta, m, s] : {std::tuple{1.0, 1.0, 1.0}, std::tuple{2.0, 1.5, 0.5}}) {
    ExperimentConfig cfg;
    cfg.kind = "relaxation";
    cfg.model = model(0, 0, 6, kTwoPi, s);
    cfg.model.beta = beta;
    cfg.model.m = m;
    cfg.modes = 4;
    cfg.ensemble = 2000;
    cfg.sim.dt = 0.02;
    const double g0 = 0.5 * std::pow(beta, 1 - s) * std::pow(m, 2 * (1 - s));
    cfg.sim.t_final = 5 / g0;
    cfg.sim.seed = 72;
    cfg.initial = "point";
    cfg.point_l2sq = 4;
    cfg.targets = {"mode(0)"};
    const auto rep = run_experiment(cfg);
    const auto& fit = rep.summary["results"]["fits"]["mode(0)"];
    REQUIRE(fit["determinate"].get<bool>());
    CHECK(std::abs(fit["rate"].get<double>() - g0) < 0.05 * g0);
  }
}

TEST_CASE("experiments") {
  ExperimentConfig cfg;
  cfg.kind = "stationarity";
  cfg.id = "stat0";
  cfg.model = model(0, 0, 6);
  cfg.modes = 4;
  cfg.ensemble = 400;
  cfg.sim.dt = 0.02;
  cfg.sim.t_final = 4;
  cfg.sim.seed = 73;
  cfg.check_times = {2, 4};
  cfg.initial = "gibbs";
  cfg.chains = 4;
  cfg.equilibrium_per_chain = 200;

  SUBCASE("stationarity of the free measure") {
    const auto rep = run_experiment(cfg);
    CHECK(rep.passed);
    CHECK(rep.summary["schema_version"] == kSchemaVersion);
  }
  SUBCASE("lambda sweep") {
    ExperimentConfig sweep;
    sweep.kind = "lambda_scaling";
    sweep.model = model(1, 1, 6);
    sweep.lambdas = {10, 100, 1000, 10000};
    const auto rep = run_experiment(sweep);
    CHECK(rep.passed);
    CHECK(rep.summary["results"]["exponent"].get<double>() >= 2);
  }
}

TEST_CASE("reproducible files") {
  ExperimentConfig cfg;
  cfg.kind = "relaxation";
  cfg.id = "rep";
  cfg.model = model(0.1, 1, 10);
  cfg.modes = 3;
  cfg.ensemble = 50;
  cfg.sim.dt = 0.02;
  cfg.sim.t_final = 2;
  cfg.sim.seed = 74;
  cfg.chains = 2;
  cfg.equilibrium_per_chain = 50;
  cfg.fit.bootstrap = 20;
  const auto a = scratch("rep_a"), b = scratch("rep_b");
  cfg.out_dir = a;
  run_experiment(cfg);
  cfg.out_dir = b;
  run_experiment(cfg);
  for (const char* f : {"rep.csv", "rep.json"}) {
    const auto x = slurp(a / f), y = slurp(b / f);
    CHECK_FALSE(x.empty());
    CHECK(x == y);
  }
  const auto rows = read_long_csv(a / "rep.csv");
  REQUIRE_FALSE(rows.empty());
  CHECK(rows.front().experiment == "rep");
}

TEST_CASE("scaling exponent") {
  std::vector<double> lams{10, 100, 1000}, logs;
  for (double l : lams) logs.push_back(-3.5 * std::pow(l, 2.25));
  CHECK(scaling_exponent(lams, logs) == doctest::Approx(2.25).epsilon(1e-12));
  CHECK_THROWS_AS(scaling_exponent({1.0}, {-1.0}), std::invalid_argument);
  CHECK_THROWS_AS(scaling_exponent({1.0, 2.0}, {-1.0}), std::invalid_argument);
}

TEST_CASE("TOML subset") {
  const auto j = parse_toml(R"(# comment
top = 1
[model]
lambda = 0.1   # trailing comment
L = "2pi"
flags = [1, 2.5, "x", true,]
big = 1_000
[a.b]
c = false
s = "has # inside"
)");
  CHECK(j["top"] == 1);
  CHECK(j["model"]["lambda"] == 0.1);
  CHECK(j["model"]["L"] == "2pi");
  CHECK(j["model"]["flags"].size() == 4);
  CHECK(j["model"]["big"] == 1000);
  CHECK(j["a"]["b"]["c"] == false);
  CHECK(j["a"]["b"]["s"] == "has # inside");

  for (const char* bad : {"x = ", "x = 1 2", "[open", "x = \"unterminated", "x = [1, 2", "x = 1\nx = 2", "= 3",
                          "x = nope"})
    CHECK_THROWS_AS(parse_toml(bad), ConfigError);
  CHECK_THROWS_AS(load_toml("/nonexistent/file.toml"), ConfigError);
}

TEST_CASE("config readers") {
  CHECK(parse_length(json(3.0)) == 3.0);
  CHECK(parse_length(json("2pi")) == doctest::Approx(kTwoPi));
  CHECK(parse_length(json("0.5pi")) == doctest::Approx(kTwoPi / 4));
  CHECK_THROWS_AS(parse_length(json("two")), ConfigError);
  CHECK(parse_radius_rule("squared_norm") == RadiusRule::squared_norm);
  CHECK_THROWS_AS(parse_radius_rule("other"), ConfigError);

  const auto root = parse_toml(R"(
[experiment]
kind = "bound_comparison"
id = "cmp"
targets = ["l2sq"]
[model]
lambda = 0.1
kappa = 1
r = 10
[sim]
dt = 0.01
t_final = 3
modes = 6
ensemble = 100
initial = "free"
[bounds]
alpha = 0.25
radius = "squared_norm"
[fit]
bootstrap = 50
)");
  const auto cfg = read_experiment(root);
  CHECK(cfg.kind == "bound_comparison");
  CHECK(cfg.targets == std::vector<std::string>{"l2sq"});
  CHECK(cfg.model.r == 10);
  CHECK(cfg.modes == 6);
  CHECK(cfg.ensemble == 100);
  CHECK(cfg.sim.dt == 0.01);
  CHECK(cfg.bounds.alpha == 0.25);
  CHECK(cfg.bounds.radius == RadiusRule::squared_norm);
  CHECK(cfg.fit.bootstrap == 50);
  CHECK_NOTHROW(cfg.validate());

  CHECK_THROWS_AS(read_experiment(parse_toml("[experiment]\nwhat = 1")), ConfigError);
  CHECK_THROWS_AS(read_experiment(parse_toml("[nope]\nx = 1")), ConfigError);
  CHECK_THROWS_AS(read_experiment(parse_toml("[model]\nlambda = \"big\"")), ConfigError);
  CHECK_THROWS_AS(read_experiment(parse_toml("[sim]\nwhat = 1")), ConfigError);

  auto bad = cfg;
  bad.kind = "other";
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.ensemble = 1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.initial = "warm";
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.id = "a b";
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.model.lambda = 1;
  bad.model.r = 4;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("io") {
  Rng rng(75);
  const auto dir = scratch("io");
  std::vector<SpectralField> fields;
  for (int i = 0; i < 5; ++i) fields.push_back(random_field(3, 2.5, rng));
  write_jsonl(dir / "f.jsonl", fields);
  const auto back = read_jsonl(dir / "f.jsonl");
  REQUIRE(back.size() == fields.size());
  for (std::size_t i = 0; i < fields.size(); ++i) {
    CHECK(back[i].length() == fields[i].length());
    for (int k = -3; k <= 3; ++k) CHECK(back[i][k] == fields[i][k]);
  }

  for (int i = 0; i < 1000; ++i) {
    const double x = std::ldexp(rng.normal(), rng.integer(-300, 300));
    CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
  }

  {
    LongCsvWriter w(dir / "x.csv");
    w.row("e", 0.5, "l2sq", "3", 1.25);
    w.row("e", 1.0, "mode(0)", "mean", -2e-300);
  }
  const auto rows = read_long_csv(dir / "x.csv");
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].observable == "mode(0)");
  CHECK(rows[1].trajectory == "mean");
  CHECK(rows[1].value == -2e-300);
  CHECK(rows[0].t == 0.5);
}
