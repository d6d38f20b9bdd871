#include <doctest.h>

#include "gnls/errors.hpp"
#include "gnls/kernels.hpp"
#include "support/support.hpp"

using namespace gnls;
using namespace gnls::test;

namespace {

struct ZeroNoise final : NormalSource {
  void fill(std::span<double> out) override { std::fill(out.begin(), out.end(), 0.0); }
};

SimConfig quiet(double dt, double t_final) {
  SimConfig sc;
  sc.dt = dt;
  sc.t_final = t_final;
  sc.noise = false;
  return sc;
}

SpectralField run(SpectralField f, const ModelParams& mp, const SimConfig& sc) {
  SplitStepIntegrator integ(mp, f.modes(), sc);
  ZeroNoise z;
  for (long i = 0; i < sc.steps(); ++i) integ.step(f, z);
  return f;
}

double distance(const SpectralField& a, const SpectralField& b) { return std::sqrt(l2sq(a - b)); }

}  // namespace

TEST_CASE("drift: closed forms and recomputation") {
  auto mp = model(0, 0, 6, 3.0, 0.6);
  mp.beta = 1.3;
  Rng rng(41);
  const auto f = random_field(5, 3.0, rng);
  const auto d = drift(f, mp);
  for (int k = -5; k <= 5; ++k) {
    const double w = mp.omega(k);
    const cplx expect = cplx(-0.5 * mp.beta * std::pow(mp.beta * w, -mp.s), 1.0) * w * f[k];
    CHECK(std::abs(d[k] - expect) < 1e-13 * std::abs(expect));
  }
  CHECK(l2sq(drift(SpectralField(5, 3.0), model(0.4, 1, 7, 3.0))) == 0.0);

  auto mn = model(0.4, 1.1, 7, 3.0, 0.8);
  const auto g = gradient(f, mn);
  const auto dn = drift(f, mn);
  for (int k = -5; k <= 5; ++k) {
    const cplx rot = cplx(0, 1) * g[k];
    const cplx damp = 0.5 * mn.beta * mn.sigma2(k) * g[k];
    CHECK(std::abs(dn[k] - (rot - damp)) < 1e-12 * (1 + std::abs(g[k])));
  }
}

TEST_CASE("linear sector is integrated exactly") {
  auto mp = model(0, 0, 6, kTwoPi, 0.5);
  SimConfig sc;
  sc.dt = 0.05;
  SplitStepIntegrator integ(mp, 8, sc);
  SpectralField f(8, kTwoPi);
  for (int k = -8; k <= 8; ++k) f[k] = cplx(1 + 0.1 * k, -0.3 + 0.07 * k);
  const auto f0 = f;
  ZeroNoise z;
  integ.step(f, z);
  for (int k = -8; k <= 8; ++k) {
    const double w = mp.omega(k), g = 0.5 * mp.sigma2(k) * w;
    const cplx mean = std::exp(cplx(-g, w) * sc.dt) * f0[k];
    CHECK(std::abs(f[k] - mean) < 1e-12 * std::abs(mean));
    const double v = integ.half_noise_variance(k);
    const double step_var = std::norm(integ.half_multiplier(k)) * v + v;
    CHECK(rel_err(step_var, (1 - std::exp(-2 * g * sc.dt)) / w) < 1e-12);
  }
}

TEST_CASE("linear sector: ensemble variance from zero data") {
  auto mp = model(0, 0, 6);
  SimConfig sc;
  sc.dt = 0.1;
  sc.t_final = 0.7;
  sc.seed = 42;
  sc.record_every = 7;
  for (int k = 0; k <= 4; ++k) sc.observables.push_back({Observable::Kind::ModeSq, k});
  const auto es = simulate_ensemble({SpectralField(4, kTwoPi)}, mp, sc, 4000, Exec::serial);
  for (int k = 0; k <= 4; ++k) {
    const double w = mp.omega(k);
    const double expect = (1 - std::exp(-w * sc.t_final * mp.sigma2(k))) / w;
    const auto i = static_cast<std::size_t>(k);
    CHECK(std::abs(es.mean(i, 1) - expect) < 3 * es.stderr_of_mean(i, 1));
  }
}

TEST_CASE("linear sector: the mean map does not depend on dt") {
  // The weak error of the linear problem vanishes, so halving dt changes nothing
  // beyond roundoff; the Richardson check below uses the nonlinear drift instead.
  auto mp = model(0, 0, 6);
  Rng rng(43);
  const auto f0 = random_field(6, kTwoPi, rng);
  const auto a = run(f0, mp, quiet(0.1, 1.0));
  const auto b = run(f0, mp, quiet(0.05, 1.0));
  CHECK(distance(a, b) < 1e-13 * std::sqrt(l2sq(f0)));
}

TEST_CASE("nonlinear drift: second-order convergence") {
  auto mp = model(0.8, 1, 8);
  Rng rng(44);
  const auto f0 = random_field(6, kTwoPi, rng, 0.5);
  const auto ref = run(f0, mp, quiet(1.0 / 1024, 1.0));
  const double e1 = distance(run(f0, mp, quiet(1.0 / 32, 1.0)), ref);
  const double e2 = distance(run(f0, mp, quiet(1.0 / 64, 1.0)), ref);
  const double e3 = distance(run(f0, mp, quiet(1.0 / 128, 1.0)), ref);
  CHECK(e1 / e2 == doctest::Approx(4).epsilon(0.25));
  CHECK(e2 / e3 == doctest::Approx(4).epsilon(0.25));
}

TEST_CASE("Hamiltonian limit conserves energy and mass to second order") {
  auto mp = model(0.8, 1, 8);
  Rng rng(45);
  const auto f0 = random_field(6, kTwoPi, rng, 0.5);
  auto drift_of = [&](double dt) {
    auto sc = quiet(dt, 1.0);
    sc.damping = false;
    const auto f = run(f0, mp, sc);
    return std::pair{std::abs(hamiltonian(f, mp) - hamiltonian(f0, mp)), std::abs(l2sq(f) - l2sq(f0))};
  };
  // kappa S^{r-1} is about 128 here; the asymptotic regime starts near dt = 1/256.
  const auto [h1, m1] = drift_of(1.0 / 256);
  const auto [h2, m2] = drift_of(1.0 / 512);
  CHECK(h1 < 1e-3 * hamiltonian(f0, mp));
  CHECK(h1 / h2 > 3.0);
  CHECK(m1 < 1e-3 * l2sq(f0));
  CHECK(m1 / m2 > 3.0);
}

TEST_CASE("damped flow without noise dissipates energy") {
  auto mp = model(0.5, 1, 10);
  Rng rng(46);
  auto f = random_field(8, kTwoPi, rng, 0.6);
  auto sc = quiet(0.01, 3.0);
  sc.rotation = false;
  SplitStepIntegrator integ(mp, 8, sc);
  ZeroNoise z;
  double prev = hamiltonian(f, mp);
  for (long i = 0; i < sc.steps(); ++i) {
    integ.step(f, z);
    const double h = hamiltonian(f, mp);
    REQUIRE(h <= prev + 1e-12 * std::abs(prev));
    prev = h;
  }
}

TEST_CASE("stiff stabiliser stays stable at coarse steps") {
  // kappa S^{r-1} is large here; the step must still contract instead of overshooting.
  auto mp = model(0, 1, 10);
  SpectralField f(4, kTwoPi);
  f[0] = 1.6;
  const double s0 = l2sq(f);
  for (double dt : {0.05, 0.02, 0.01}) {
    const auto g = run(f, mp, quiet(dt, 0.5));
    CHECK(l2sq(g) < s0);
    CHECK(std::isfinite(l2sq(g)));
  }
}

TEST_CASE("simulate: trivial and reproducible series") {
  auto mp = model(0.1, 1, 10);
  SimConfig sc = quiet(0.01, 0.2);
  sc.observables = {Observable::parse("l2sq"), Observable::parse("hamiltonian"), Observable::parse("mode_re(1)")};
  const auto ts = simulate(SpectralField(4, kTwoPi), mp, sc);
  CHECK(ts.t.size() == 21);
  for (const auto& series : ts.values)
    for (double v : series) CHECK(v == 0.0);

  sc.noise = true;
  sc.seed = 47;
  sc.record_every = 5;
  const auto a = simulate(SpectralField(4, kTwoPi), mp, sc, 3);
  const auto b = simulate(SpectralField(4, kTwoPi), mp, sc, 3);
  const auto c = simulate(SpectralField(4, kTwoPi), mp, sc, 4);
  CHECK(a.t.size() == 5);
  CHECK(a.values == b.values);
  CHECK(a.values != c.values);
}

TEST_CASE("simulate: blow-up cap aborts with diagnostics") {
  auto mp = model(0, 0, 6);
  SimConfig sc;
  sc.dt = 0.01;
  sc.t_final = 1;
  sc.l2_cap = 1e-3;
  sc.seed = 48;
  CHECK_THROWS_AS(simulate(SpectralField(4, kTwoPi), mp, sc), BlowUpError);
  try {
    simulate(SpectralField(4, kTwoPi), mp, sc);
  } catch (const BlowUpError& e) {
    CHECK(e.l2sq() > 1e-3);
    CHECK(e.time() > 0);
  }
}

TEST_CASE("observables and config validation") {
  CHECK(Observable::parse("mode_sq(-3)").k == -3);
  CHECK(Observable::parse(" mode_im( 2 ) ").name() == "mode_im(2)");
  CHECK(Observable::parse("h0").name() == "h0");
  CHECK_THROWS_AS(Observable::parse("entropy"), ConfigError);

  SimConfig sc;
  sc.dt = -1;
  CHECK_THROWS_AS(sc.validate(), ConfigError);
  sc.dt = 0.1;
  sc.t_final = 0.05;
  CHECK_THROWS_AS(sc.validate(), ConfigError);
  sc.t_final = 1;
  sc.scheme = "euler";
  CHECK_THROWS_AS(sc.validate(), ConfigError);
}
