#include <doctest.h>

#include <algorithm>
#include <limits>

#include "gnls/errors.hpp"
#include "gnls/witten.hpp"
#include "support/support.hpp"

using namespace gnls;
using namespace gnls::test;

namespace {

std::vector<cplx> random_coeffs(int N, Rng& rng, double amp = 0.6) {
  return coeff_vector(random_field(N, kTwoPi, rng, amp));
}

// 2 (u^H M11 u + Re(u-bar^T M12 u-bar)).
double block_quadform(const WittenHessian& h, const std::vector<cplx>& u) {
  const Eigen::Map<const Eigen::VectorXcd> v(u.data(), static_cast<Eigen::Index>(u.size()));
  const cplx a = v.adjoint() * h.M11 * v;
  const cplx b = v.conjugate().transpose() * h.M12 * v.conjugate();
  return 2 * (a.real() + b.real());
}

double second_difference(const std::vector<cplx>& a, const std::vector<cplx>& u, const WittenParams& wp, double t) {
  const int N = static_cast<int>(a.size() - 1) / 2;
  std::vector<cplx> plus(a), minus(a);
  for (int n = -N; n <= N; ++n) {
    const auto i = static_cast<std::size_t>(n + N);
    const cplx step = t * std::pow(n * n + 1.0, -wp.s) * u[i];
    plus[i] += step;
    minus[i] -= step;
  }
  return (phi_truncated(plus, wp) + phi_truncated(minus, wp) - 2 * phi_truncated(a, wp)) / (t * t);
}

// Richardson-extrapolated, O(t^4).
double second_derivative(const std::vector<cplx>& a, const std::vector<cplx>& u, const WittenParams& wp, double t) {
  return (4 * second_difference(a, u, wp, t / 2) - second_difference(a, u, wp, t)) / 3;
}

}  // namespace

TEST_CASE("parameter mapping") {
  const auto wp = witten_params_from_model(model(0.3, 2, 10));
  CHECK(wp.lambda == doctest::Approx(0.3 / kTwoPi));
  CHECK(wp.kappa == 2);
  CHECK(wp.r == 9);
  CHECK_THROWS_AS(witten_params_from_model(model(0.3, 2, 10, 3.0)), ConfigError);
  auto mp = model(0.3, 2, 10);
  mp.beta = 2;
  CHECK_THROWS_AS(witten_params_from_model(mp), ConfigError);
}

TEST_CASE("truncated Hamiltonian") {
  const WittenParams wp{0.7, 1.3, 4, 1};
  CHECK(phi_truncated(std::vector<cplx>(9), wp) == 0.0);

  std::vector<cplx> one(7);
  const double rho = 0.8;
  one[3] = std::polar(rho, 0.4);
  const double expect = rho * rho - 0.5 * wp.lambda * std::pow(rho, 4) + wp.kappa / (wp.r + 1) * std::pow(rho, 2 * (wp.r + 1));
  CHECK(rel_err(phi_truncated(one, wp), expect) < 1e-14);

  Rng rng(61);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = random_coeffs(rng.integer(0, 12), rng, 1.0);
    CHECK(rel_err(quartic_sum(a), direct_quartic_sum(a)) < 1e-10);
  }
}

TEST_CASE("Hessian blocks") {
  SUBCASE("Gaussian case") {
    Rng rng(62);
    const auto a = random_coeffs(3, rng);
    for (double s : {0.0, 0.5, 1.0}) {
      const auto h = hessian_blocks(a, {0, 0, 9, s});
      for (int n = -3; n <= 3; ++n)
        for (int m = -3; m <= 3; ++m) {
          const double d = n == m ? std::pow(n * n + 1.0, 1 - 2 * s) : 0.0;
          CHECK(std::abs(h.M11(n + 3, m + 3) - d) < 1e-15);
        }
      CHECK(h.M12.norm() == 0.0);
    }
  }
  SUBCASE("one mode by hand") {
    // -(1/2)|1 + t u|^4 has second derivative -6 along u = 1 and -2 along u = i, so
    // M11 + M12 = -3 and M11 - M12 = -1 after removing the quadratic part.
    std::vector<cplx> a{1.0};
    const WittenParams wp{1, 0, 9, 0};
    const auto exact = hessian_blocks(a, wp);
    CHECK(std::abs(exact.M11(0, 0) - cplx(1 - 2.0)) < 1e-15);
    CHECK(std::abs(exact.M12(0, 0) - cplx(-1.0)) < 1e-15);
    // Prefactor lambda/2 on both quartic blocks: B = B' = 1/2.
    const auto reduced = hessian_blocks(a, wp, QuarticBlocks::reduced);
    CHECK(std::abs(reduced.M11(0, 0) - cplx(1 - 0.5)) < 1e-15);
    CHECK(std::abs(reduced.M12(0, 0) - cplx(-0.5)) < 1e-15);
  }
  SUBCASE("finite-difference oracle") {
    Rng rng(63);
    double worst = 0;
    for (int trial = 0; trial < 200; ++trial) {
      const WittenParams wp{rng.uniform(0, 2), rng.uniform(0, 2), static_cast<double>(rng.integer(2, 9)),
                            rng.uniform(0, 1)};
      const int N = rng.integer(0, 4);
      const auto a = random_coeffs(N, rng);
      const auto u = random_coeffs(N, rng);
      const double fd = second_derivative(a, u, wp, 1e-3);
      const double q = block_quadform(hessian_blocks(a, wp), u);
      worst = std::max(worst, std::abs(fd - q) / std::max(1.0, std::abs(fd)));

      // The real form carries the same quadratic form.
      Eigen::VectorXd w(2 * (2 * N + 1));
      for (int i = 0; i <= 2 * N; ++i) {
        w(i) = u[static_cast<std::size_t>(i)].real();
        w(i + 2 * N + 1) = u[static_cast<std::size_t>(i)].imag();
      }
      CHECK(std::abs(2 * w.dot(real_form(hessian_blocks(a, wp)) * w) - q) < 1e-10 * std::max(1.0, std::abs(q)));
    }
    CHECK(worst < 1e-6);
  }
  SUBCASE("reduced prefactors disagree with the Hamiltonian") {
    Rng rng(64);
    const WittenParams wp{1.0, 0, 9, 0.5};
    const auto a = random_coeffs(2, rng, 1.0);
    const auto u = random_coeffs(2, rng, 1.0);
    const double fd = second_difference(a, u, wp, 1e-4);
    CHECK(std::abs(block_quadform(hessian_blocks(a, wp, QuarticBlocks::reduced), u) - fd) > 1e-3 * std::abs(fd));
  }
  SUBCASE("symmetries") {
    Rng rng(65);
    for (int trial = 0; trial < 100; ++trial) {
      const WittenParams wp{rng.uniform(0, 3), rng.uniform(0, 3), 9, rng.uniform(0, 1)};
      const auto h = hessian_blocks(random_coeffs(rng.integer(0, 5), rng), wp);
      CHECK((h.M11 - h.M11.adjoint()).norm() <= 1e-12 * std::max(1.0, h.M11.norm()));
      CHECK((h.M12 - h.M12.transpose()).norm() <= 1e-12 * std::max(1.0, h.M12.norm()));
      const Eigen::Index D = h.M11.rows();
      Eigen::MatrixXd K(2 * D, 2 * D);
      K << h.M11.real() + h.M12.real(), h.M12.imag() - h.M11.imag(), h.M11.imag() + h.M12.imag(),
          h.M11.real() - h.M12.real();
      CHECK((K - K.transpose()).norm() <= 1e-12 * std::max(1.0, K.norm()));
    }
  }
}

TEST_CASE("pencil") {
  SUBCASE("Gaussian eigenvalues") {
    Rng rng(66);
    for (double s : {0.0, 0.3, 0.5, 1.0}) {
      const int N = 4;
      const auto ev = pencil_eigenvalues(hessian_blocks(random_coeffs(N, rng), {0, 0, 9, s}));
      std::vector<double> expect;
      for (int n = -N; n <= N; ++n) expect.insert(expect.end(), 2, std::pow(n * n + 1.0, 1 - s));
      std::sort(expect.begin(), expect.end());
      for (std::size_t i = 0; i < expect.size(); ++i)
        CHECK(std::abs(ev(static_cast<Eigen::Index>(i)) - expect[i]) < 1e-10 * expect[i]);
    }
  }
  SUBCASE("origin reduces to the Gaussian value") {
    for (double lam : {0.0, 0.4, 3.0}) {
      const auto res = min_eig_margin({std::vector<cplx>(9)}, {lam, 1, 9, 1});
      CHECK(res.c_hat == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
  SUBCASE("the stabiliser only adds") {
    Rng rng(67);
    for (int trial = 0; trial < 50; ++trial) {
      const auto a = random_coeffs(3, rng, 1.0);
      CHECK(pencil_min(hessian_blocks(a, {0, 2, 9, 1})) >= 1 - 1e-12);
      CHECK(pencil_min(hessian_blocks(a, {0.5, 0, 9, 1})) <= 1 + 1e-12);
    }
  }
  SUBCASE("sample bookkeeping") {
    Rng rng(68);
    std::vector<std::vector<cplx>> samples;
    for (int i = 0; i < 20; ++i) samples.push_back(random_coeffs(3, rng, 0.3 + 0.05 * i));
    const WittenParams wp{0.8, 0.1, 9, 1};
    double best = 1e300;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const double c = pencil_min(hessian_blocks(samples[i], wp));
      if (c < best) best = c, arg = i;
    }
    const auto res = min_eig_margin(samples, wp);
    CHECK(res.c_hat == best);
    CHECK(res.worst_index == arg);
    CHECK(res.worst == samples[arg]);
    CHECK(res.rejected == 0);

    samples.push_back(std::vector<cplx>(7, cplx(std::numeric_limits<double>::quiet_NaN())));
    CHECK_THROWS(pencil_min(hessian_blocks(samples.back(), wp)));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(min_eig_margin({}, {}), std::invalid_argument);
  }
}
