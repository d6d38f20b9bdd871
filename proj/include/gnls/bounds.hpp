#pragma once

// Certified log-Sobolev / spectral-gap constants by convexity comparison.
//
// The pipeline is written once for a generic Real so that every number can
// be replayed in 128-bit floating point and compared with the double run.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include <boost/math/special_functions/bernoulli.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "gnls/errors.hpp"
#include "gnls/field.hpp"
#include "gnls/hamiltonian.hpp"

namespace gnls {

using Quad = boost::multiprecision::cpp_bin_float_quad;

/// How the radius condition reads R. `norm_powers` puts R^{2/(1-2 gamma)} and R^{2r-2} in the
/// radius condition, i.e. treats R as a norm; `squared_norm` uses the powers
/// 1/(1-2 gamma) and r-1 that match the cutoff in T = ||P_n phi||^2.
enum class RadiusRule { norm_powers, squared_norm };

/// User-facing knobs; unset values take the defaults documented in resolve_config.
struct BoundOptions {
  double alpha = 0.5;
  RadiusRule radius = RadiusRule::norm_powers;
  std::optional<double> a;
  std::optional<double> gamma;
  std::optional<double> epsilon;
};

template <class Real>
struct BoundConfig {
  Real alpha, a, gamma, epsilon;
  Real q, q_prime;
  Real m_a_sq;  // m^2 - a^2/L^2
};

/// W = (c/2) T chi(T/R), T = ||P_n phi||^2. No n means W = 0.
template <class Real>
struct PerturbationSpec {
  Real c = 0;
  std::optional<Real> n;
  Real R = 0;
  bool active() const { return n.has_value(); }
};

template <class Real>
struct Selection {
  BoundConfig<Real> config;
  PerturbationSpec<Real> perturbation;
  Real sobolev_sq;                 // C_{a,gamma}^2
  Real low_margin;
  std::optional<Real> high_margin;  // at the selected n
  Real lambda0;                    // largest lambda with nonnegative low margin
  RadiusRule radius_rule = RadiusRule::norm_powers;
};

template <class Real>
struct Certificate {
  Selection<Real> selection;
  Real C0;
  Real w_sup;
  Real log_C_final;
  Real C_final;
  Real gap;         // = C_final
  Real rate_bound;  // gap in the time units of the simulated equation (gap / 2)
};

struct WittenBound {
  double value = 0;
  double K = 0;
  bool certified = false;  // false when value <= 0
  double epsilon = 0;
};

struct GapCertificate : Certificate<double> {
  std::optional<WittenBound> witten_e1;
  std::optional<double> witten_rate_bound;
  std::string alpha_convention = "C_final = alpha * C0 * exp(-2 beta w_sup)";
};

namespace detail {

template <class Real>
Real pi() {
  return boost::math::constants::pi<Real>();
}

/// Hurwitz zeta sum_{k>=K} k^{-s} by Euler-Maclaurin at the cutoff K, with the
/// magnitude of the first omitted correction added (upper bound).
template <class Real>
Real hurwitz_zeta_upper(const Real& s, long K) {
  using std::abs;
  using std::pow;
  const Real x = K;
  Real sum = pow(x, 1 - s) / (s - 1) + pow(x, -s) / 2;
  Real rising = s;  // s (s+1) ... (s+2j-2)
  Real xpow = pow(x, -s - 1);
  Real fact = 2;  // (2j)!
  const Real tiny = std::numeric_limits<Real>::epsilon() * abs(sum) * Real(1e-4);
  for (int j = 1; j < 60; ++j) {
    const Real term = boost::math::bernoulli_b2n<Real>(j) / fact * rising * xpow;
    if (abs(term) < tiny) return sum + abs(term);
    sum += term;
    rising *= (s + 2 * j - 1) * (s + 2 * j);
    xpow /= x * x;
    fact *= Real(2 * j + 1) * Real(2 * j + 2);
  }
  throw std::runtime_error("hurwitz zeta series did not converge");
}

}  // namespace detail

/// Upper bound for C_{a,gamma}^2 = sum_{k in Z} (a^2 + (2 pi k)^2)^{-2 gamma}.
template <class Real>
Real sobolev_constant_sq(const Real& a, const Real& gamma) {
  using std::abs;
  using std::pow;
  if (!(gamma > Real(0.25))) throw ConfigError("sobolev constant diverges for gamma <= 1/4");
  if (!(a > 0)) throw ConfigError("a must be positive");
  const Real two_pi = 2 * detail::pi<Real>();
  const Real b = (a / two_pi) * (a / two_pi);
  long K = 64;
  while (Real(K) * Real(K) < 4 * b) K *= 2;

  Real head = pow(a * a, -2 * gamma);
  for (long k = 1; k < K; ++k) head += 2 * pow(a * a + two_pi * two_pi * Real(k) * Real(k), -2 * gamma);

  // Tail: (2 pi)^{-4 gamma} sum_{k>=K} k^{-4 gamma} (1 + b/k^2)^{-2 gamma}, expanded binomially.
  Real tail = 0;
  Real binom = 1;  // binom(-2 gamma, j)
  Real bj = 1;
  const Real eps = std::numeric_limits<Real>::epsilon();
  for (int j = 0; j < 400; ++j) {
    const Real term = binom * bj * detail::hurwitz_zeta_upper<Real>(4 * gamma + 2 * j, K);
    tail += term;
    if (abs(term) < eps * abs(tail) * Real(1e-4)) {
      tail += abs(term);
      break;
    }
    binom *= (-2 * gamma - j) / Real(j + 1);
    bj *= b;
  }
  return head + 2 * pow(two_pi, -4 * gamma) * tail;
}

/// Resolve defaults: a = mL/2, gamma at the middle of (1/4, gamma_max) with
/// gamma_max = 1/2 - 1/(2(r-1)), epsilon = (gamma_max - gamma)/2.
template <class Real>
BoundConfig<Real> resolve_config(const ModelParams& mp, const BoundOptions& o) {
  mp.validate();
  const Real r = mp.r, m = mp.m, L = mp.L;
  const Real gamma_max = Real(0.5) - 1 / (2 * (r - 1));
  if (!(gamma_max > Real(0.25))) throw InfeasibleError("r too small: no gamma in (1/4, 1/2) with (1-2 gamma)(r-1) > 1");
  BoundConfig<Real> bc;
  bc.alpha = o.alpha;
  if (!(bc.alpha > 0 && bc.alpha < 1)) throw ConfigError("alpha must lie in (0, 1)");
  bc.a = o.a ? Real(*o.a) : m * L / 2;
  if (!(bc.a > 0)) throw ConfigError("a must be positive");
  bc.m_a_sq = m * m - bc.a * bc.a / (L * L);
  if (!(bc.m_a_sq > 0)) throw ConfigError("a must satisfy a < mL");
  bc.gamma = o.gamma ? Real(*o.gamma) : (Real(0.25) + gamma_max) / 2;
  if (!(bc.gamma > Real(0.25) && bc.gamma < Real(0.5))) throw ConfigError("gamma must lie in (1/4, 1/2)");
  bc.q = (1 - 2 * bc.gamma) * (r - 1) - 1;
  if (!(bc.q > 0)) throw InfeasibleError("gamma too large for r: (1-2 gamma)(r-1) <= 1");
  bc.epsilon = o.epsilon ? Real(*o.epsilon) : (gamma_max - bc.gamma) / 2;
  if (!(bc.epsilon > 0)) throw ConfigError("epsilon must be positive");
  bc.q_prime = (1 - 2 * (bc.gamma + bc.epsilon)) * (r - 1) - 1;
  if (!(bc.gamma + bc.epsilon < Real(0.5)) || !(bc.q_prime > 0))
    throw ConfigError("epsilon too large: need gamma + epsilon < 1/2 and q' > 0");
  return bc;
}

/// Coefficient K and exponent e with low margin = (1-alpha) m_a^2 - K lambda^e.
template <class Real>
std::pair<Real, Real> low_mode_power(const ModelParams& mp, const BoundConfig<Real>& bc, const Real& Csq) {
  using std::pow;
  const Real q = bc.q, kr = Real(mp.kappa) * Real(mp.r);
  const Real e = (q + 1) / (q * (1 - 2 * bc.gamma));
  const Real K = q / (1 + q) * pow((1 + q) * kr, -1 / q) * pow(3 * Csq * pow(Real(mp.L), 4 * bc.gamma - 1), e);
  return {K, e};
}

template <class Real>
Real low_mode_margin(const ModelParams& mp, const BoundConfig<Real>& bc, const Real& Csq) {
  using std::pow;
  const Real base = (1 - bc.alpha) * bc.m_a_sq;
  if (mp.lambda == 0) return base;
  const auto [K, e] = low_mode_power(mp, bc, Csq);
  return base - K * pow(Real(mp.lambda), e);
}

template <class Real>
Real high_mode_margin(const ModelParams& mp, const BoundConfig<Real>& bc, const Real& Csq, const Real& n) {
  using std::pow;
  const Real base = (1 - bc.alpha) * bc.m_a_sq;
  if (mp.lambda == 0) return base;
  const Real qp = bc.q_prime, kr = Real(mp.kappa) * Real(mp.r), L = mp.L;
  const Real ge = bc.gamma + bc.epsilon;
  const Real e = (qp + 1) / (qp * (1 - 2 * ge));
  const Real inner = 3 * Real(mp.lambda) * Csq * pow(L, 4 * bc.gamma - 1) *
                     pow(2 * detail::pi<Real>() * n / L, -4 * bc.epsilon);
  return base - qp / (1 + qp) * pow((1 + qp) * kr, -1 / qp) * pow(inner, e);
}

template <class Real>
Selection<Real> select_parameters(const ModelParams& mp, const BoundOptions& opts) {
  using std::ceil;
  using std::pow;
  Selection<Real> sel;
  sel.radius_rule = opts.radius;
  sel.config = resolve_config<Real>(mp, opts);
  const auto& bc = sel.config;
  sel.sobolev_sq = sobolev_constant_sq<Real>(bc.a, bc.gamma);
  const Real base = (1 - bc.alpha) * bc.m_a_sq;
  {
    const auto [K, e] = low_mode_power(mp, bc, sel.sobolev_sq);
    sel.lambda0 = pow(base / K, 1 / e);
  }
  sel.low_margin = low_mode_margin(mp, bc, sel.sobolev_sq);
  if (sel.low_margin >= 0) return sel;

  auto& ps = sel.perturbation;
  ps.c = -sel.low_margin;

  // Smallest integer n with nonnegative high-mode margin, from the closed form.
  const Real qp = bc.q_prime, kr = Real(mp.kappa) * Real(mp.r), L = mp.L;
  const Real ge = bc.gamma + bc.epsilon;
  const Real e = (qp + 1) / (qp * (1 - 2 * ge));
  const Real Kp = qp / (1 + qp) * pow((1 + qp) * kr, -1 / qp) *
                  pow(3 * Real(mp.lambda) * sel.sobolev_sq * pow(L, 4 * bc.gamma - 1), e);
  const Real nstar = L / (2 * detail::pi<Real>()) * pow(Kp / base, 1 / (4 * bc.epsilon * e));
  Real n = ceil(nstar);
  if (n < 1) n = 1;
  for (int i = 0; high_mode_margin(mp, bc, sel.sobolev_sq, n) < 0; ++i) {
    if (i > 64) throw std::runtime_error("could not satisfy the high-mode margin");
    n = n < Real(1e15) ? n + 1 : ceil(n * (1 + 16 * std::numeric_limits<Real>::epsilon()));
  }
  ps.n = n;
  sel.high_margin = high_mode_margin(mp, bc, sel.sobolev_sq, n);

  // R: smallest root of -A R^p + kappa r R^top = 35 c, beyond the minimiser of the left side.
  const Real A = pow(3 * Real(mp.lambda) * sel.sobolev_sq * pow(L, 4 * bc.gamma - 1), 1 / (1 - 2 * bc.gamma));
  const bool sq = opts.radius == RadiusRule::squared_norm;
  const Real p = (sq ? 1 : 2) / (1 - 2 * bc.gamma);
  const Real top = (sq ? 1 : 2) * (Real(mp.r) - 1);
  auto g = [&](const Real& R) { return -A * pow(R, p) + kr * pow(R, top) - 35 * ps.c; };
  const Real Rmin = pow(A * p / (kr * top), 1 / (top - p));
  Real lo = Rmin, hi = 2 * Rmin;
  while (g(hi) <= 0) {
    lo = hi;
    hi *= 2;
  }
  std::uintmax_t iters = 400;
  boost::math::tools::eps_tolerance<Real> tol(std::numeric_limits<Real>::digits - 3);
  const auto bracket = boost::math::tools::toms748_solve(g, lo, hi, tol, iters);
  ps.R = g(bracket.first) >= 0 ? bracket.first : bracket.second;
  return sel;
}

/// Gaussian LSI constant beta^{1-s} m^{2(1-s)}, normalised to 1 at beta = m = 1.
template <class Real>
Real gaussian_lsi_constant(const ModelParams& mp) {
  using std::pow;
  return pow(Real(mp.beta), 1 - Real(mp.s)) * pow(Real(mp.m), 2 * (1 - Real(mp.s)));
}

template <class Real>
Certificate<Real> certify_pipeline(const ModelParams& mp, const BoundOptions& opts) {
  using std::exp;
  using std::log;
  Certificate<Real> cert;
  cert.selection = select_parameters<Real>(mp, opts);
  const auto& ps = cert.selection.perturbation;
  cert.C0 = gaussian_lsi_constant<Real>(mp);
  cert.w_sup = ps.active() ? ps.c * ps.R : Real(0);
  cert.log_C_final = log(cert.selection.config.alpha * cert.C0) - 2 * Real(mp.beta) * cert.w_sup;
  cert.C_final = exp(cert.log_C_final);
  cert.gap = cert.C_final;
  cert.rate_bound = cert.gap / 2;
  return cert;
}

/// Full certificate in double precision, with the Witten gap bound attached
/// when beta = m = 1 and L = 2 pi.
GapCertificate certify(const ModelParams& mp, const BoundOptions& opts = {});

/// 1 - (lambda/eps)^{r/(r-1)} ((r-1)/r) (kappa r)^{-1/(r-1)}, the minimum over K > 0
/// of 1 - (lambda/eps) K + kappa K^r, attained at K = (lambda/(kappa r eps))^{1/(r-1)}.
WittenBound witten_gap_bound(double lambda, double kappa, double r, double eps);

// Cut-off and the convexity-restoring functional.
double chi(double t);
double chi_prime(double t);
double chi_second(double t);
double chi_R(double t, double R);

/// Projection cutoff usable on a field: the selected n clipped to the field's N.
int effective_cutoff(const PerturbationSpec<double>& ps, int N);

double w_value(const SpectralField& f, const PerturbationSpec<double>& ps);
double w_sup(const PerturbationSpec<double>& ps);
double w_hessian_quadform(const SpectralField& f, const SpectralField& eta, const PerturbationSpec<double>& ps);

/// |c g1(T) ||P eta||^2 + c g2(T) (Re<P phi, eta>)^2|, the part of Hess W beyond c chi_R ||P eta||^2.
double w_remainder(const SpectralField& f, const SpectralField& eta, const PerturbationSpec<double>& ps);

/// <eta, Hess_{H+W} eta> - alpha <eta, Hess_{H0} eta>.
double hessian_lower_bound_check(const SpectralField& f, const SpectralField& eta, const ModelParams& mp,
                                 const BoundConfig<double>& bc, const PerturbationSpec<double>& ps);

/// Right side of the mode-split sup-norm estimate for psi = f, using C_{a,gamma}^2.
double mode_split_bound(const SpectralField& f, const BoundConfig<double>& bc, double Csq, int n);

/// Lower bound of the low-mode Hessian expression along a direction with ||P eta|| = 1:
/// (1-alpha) m_a^2 - A S^{1/(1-2 gamma)} + kappa r S^{r-1} + c (chi_R(T) + g1(T) + min(0, T g2(T))),
/// S = ||phi||^2, T = ||P phi||^2 <= S.
double low_mode_scan_value(const ModelParams& mp, const Selection<double>& sel, double S, double T);

/// Young-type bound: -c t + b t^{1+q} >= -(q/(1+q)) ((1+q) b)^{-1/q} c^{(q+1)/q}.
double young_lower_bound(double b, double c, double q);

}  // namespace gnls
