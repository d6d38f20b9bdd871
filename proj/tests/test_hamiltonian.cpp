#include <doctest.h>

#include "gnls/errors.hpp"
#include "support/support.hpp"

using namespace gnls;
using namespace gnls::test;

namespace {

// Independent grid evaluation of the three energy terms by Riemann sums.
struct GridEnergy {
  double h0, v1;
};

GridEnergy grid_energy(const SpectralField& f, double m, long M) {
  GridEnergy e{};
  e.h0 = 0.5 * riemann(f, M, [m](cplx v, cplx d) { return m * m * std::norm(v) + std::norm(d); });
  e.v1 = 0.25 * riemann(f, M, [](cplx v, cplx) { return std::norm(v) * std::norm(v); });
  return e;
}

}  // namespace

TEST_CASE("h0: single modes") {
  auto mp = model(0, 0, 6);
  SpectralField f(2, kTwoPi);
  f[0] = 1.0;
  CHECK(h0(f, mp) == doctest::Approx(0.5));
  f[0] = 0;
  f[1] = 1.0;
  CHECK(h0(f, mp) == doctest::Approx(1.0));
}

TEST_CASE("v1, v2: zero field and constant field") {
  SpectralField z(4, 3.0);
  CHECK(v1(z) == 0.0);
  CHECK(v2(z, 7) == 0.0);

  const double L = 3.0, c = 0.8, r = 7;
  SpectralField f(4, L);
  f[0] = c * std::sqrt(L);
  CHECK(rel_err(v1(f), 0.25 * std::pow(c, 4) * L) < 1e-14);
  CHECK(rel_err(v2(f, r), std::pow(c * c * L, r) / (2 * r)) < 1e-14);

  auto mp = model(0.3, 2.0, r, L);
  mp.m = 1.3;
  const double expect = 0.5 * mp.m * mp.m * c * c * L - 0.3 * 0.25 * std::pow(c, 4) * L +
                        2.0 * std::pow(c * c * L, r) / (2 * r);
  CHECK(rel_err(hamiltonian(f, mp), expect) < 1e-14);
}

TEST_CASE("energies against Riemann sums") {
  Rng rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const double L = rng.uniform(1.0, 8.0);
    auto mp = model(rng.uniform(0, 2), rng.uniform(0.1, 2), 6 + trial, L);
    mp.m = rng.uniform(0.5, 2.0);
    const auto f = random_field(5, L, rng, 0.6);
    const auto g = grid_energy(f, mp.m, 200000);
    CHECK(rel_err(h0(f, mp), g.h0) < 1e-10);
    CHECK(rel_err(v1(f), g.v1) < 1e-8);
    const double full = g.h0 - mp.lambda * g.v1 + mp.kappa * std::pow(l2sq(f), mp.r) / (2 * mp.r);
    CHECK(rel_err(hamiltonian(f, mp), full) < 1e-10);
  }

  const auto f = random_field(8, 2.0, rng);
  CHECK(rel_err(v1(f), 0.25 * riemann(f, 1000000, [](cplx v, cplx) { return std::norm(v) * std::norm(v); })) <
        1e-8);
}

TEST_CASE("quartic term agrees with direct convolution") {
  Rng rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const int N = rng.integer(1, 9);
    const double L = rng.uniform(0.5, 5);
    const auto f = random_field(N, L, rng);
    // int |phi|^4 = L^{-1} sum_{k1-k2+k3-k4=0} c c* c c*
    CHECK(rel_err(4 * v1(f), direct_quartic_sum(coeff_vector(f)) / L) < 1e-12);
  }
}

TEST_CASE("gradient: linear case and unit sphere") {
  Rng rng(13);
  auto mp = model(0, 0, 6, 4.0);
  mp.m = 1.7;
  const auto f = random_field(5, 4.0, rng);
  const auto g = gradient(f, mp);
  for (int k = -5; k <= 5; ++k) CHECK(std::abs(g[k] - mp.omega(k) * f[k]) < 1e-14 * (1 + std::abs(f[k])));

  // Stabiliser alone at ||phi|| = 1: gradient is kappa phi on top of the free part.
  auto ms = model(0, 2.5, 8, 4.0);
  auto u = f;
  u *= cplx(1 / std::sqrt(l2sq(f)));
  const auto gs = gradient(u, ms);
  for (int k = -5; k <= 5; ++k) CHECK(std::abs(gs[k] - ms.omega(k) * u[k] - 2.5 * u[k]) < 1e-13);
}

TEST_CASE("gradient: directional derivatives") {
  Rng rng(14);
  double worst = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const double L = rng.uniform(1, 8);
    auto mp = model(rng.uniform(0, 3), rng.uniform(0.1, 2), rng.uniform(5.5, 12), L);
    const auto f = random_field(rng.integer(1, 10), L, rng, 0.5);
    const auto eta = random_field(f.modes(), L, rng);
    const double t = 1e-5;
    const double fd = (hamiltonian(f + cplx(t) * eta, mp) - hamiltonian(f - cplx(t) * eta, mp)) / (2 * t);
    const double an = real_inner(gradient(f, mp), eta);
    worst = std::max(worst, std::abs(fd - an) / std::max(std::abs(an), 1.0));
  }
  CHECK(worst < 1e-7);
}

TEST_CASE("hessian quadratic forms") {
  Rng rng(15);
  const double L = 3.0;
  auto mp = model(0.7, 1.2, 7, L);
  const auto f = random_field(6, L, rng, 0.5);
  const auto eta = random_field(6, L, rng);

  SUBCASE("zero direction") {
    const SpectralField zero(6, L);
    for (auto t : {Term::H0, Term::V1, Term::V2, Term::Full}) CHECK(hessian_quadform(f, zero, mp, t) == 0.0);
  }
  SUBCASE("free part is twice h0") { CHECK(rel_err(hessian_quadform(f, eta, mp, Term::H0), 2 * h0(eta, mp)) < 1e-14); }
  SUBCASE("quartic part in closed form") {
    // d^2/dt^2 (1/4) int |phi + t eta|^4 = int |phi|^2 |eta|^2 + 2 (Re conj(phi) eta)^2
    const int M = 4096;
    const auto gf = synthesize(f, M), ge = synthesize(eta, M);
    double expect = 0;
    for (int j = 0; j < M; ++j) {
      const cplx a = gf.samples[j], b = ge.samples[j];
      const double re = (std::conj(a) * b).real();
      expect += std::norm(a) * std::norm(b) + 2 * re * re;
    }
    expect *= L / M;
    CHECK(rel_err(hessian_quadform(f, eta, mp, Term::V1), expect) < 1e-12);
  }
  SUBCASE("full form against second differences") {
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
      auto m2 = model(rng.uniform(0, 3), rng.uniform(0.1, 2), rng.uniform(5.5, 12), L);
      const auto a = random_field(6, L, rng, 0.5);
      const auto b = random_field(6, L, rng);
      const double t = 1e-4;
      const double fd =
          (hamiltonian(a + cplx(t) * b, m2) + hamiltonian(a - cplx(t) * b, m2) - 2 * hamiltonian(a, m2)) / (t * t);
      const double an = hessian_quadform(a, b, m2, Term::Full);
      worst = std::max(worst, std::abs(fd - an) / std::max(std::abs(an), 2 * h0(b, m2)));
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("quartic Hessian sandwich") {
  Rng rng(16);
  auto mp = model(0, 0, 6, 2.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto f = random_field(rng.integer(1, 8), 2.0, rng, rng.uniform(0.1, 2));
    const auto eta = random_field(f.modes(), 2.0, rng);
    const double q = hessian_quadform(f, eta, mp, Term::V1);
    const int M = dealiased_grid_size(f.modes());
    const auto gf = synthesize(f, M), ge = synthesize(eta, M);
    double cross = 0;
    for (int j = 0; j < M; ++j) cross += std::norm(gf.samples[j]) * std::norm(ge.samples[j]);
    cross *= 2.0 / M;
    REQUIRE(q >= -1e-9 * cross);
    REQUIRE(q <= 3 * cross * (1 + 1e-9));
  }
}

TEST_CASE("parallelogram identity for h0 and stabiliser convexity") {
  Rng rng(17);
  auto mp = model(0, 0, 6, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto f = random_field(7, 5.0, rng, 2);
    const auto eta = random_field(7, 5.0, rng);
    const double lhs = 0.5 * (h0(f + eta, mp) + h0(f - eta, mp)) - h0(f, mp);
    CHECK(rel_err(lhs, h0(eta, mp)) < 1e-13);

    const double r = rng.uniform(5, 20);
    const auto g = random_field(7, 5.0, rng, 0.4);
    const double conv = 0.5 * (v2(g + eta, r) + v2(g - eta, r)) - v2(g, r);
    CHECK(conv >= 0.5 * std::pow(l2sq(g), r - 1) * l2sq(eta) * (1 - 1e-12));
  }
}

TEST_CASE("model validation") {
  CHECK_NOTHROW(model(0, 0, 2).validate());
  CHECK_THROWS_AS(model(0.1, 0, 6).validate(), ConfigError);
  CHECK_THROWS_AS(model(0.1, 1, 5).validate(), ConfigError);
  CHECK_THROWS_AS(model(-1, 1, 6).validate(), ConfigError);
  CHECK_THROWS_AS(model(0, 0, 6, 1.0, 1.5).validate(), ConfigError);
  auto mp = model(0, 0, 6);
  mp.m = 0;
  CHECK_THROWS_AS(mp.validate(), ConfigError);
}
