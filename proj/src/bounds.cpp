#include "gnls/bounds.hpp"

#include <algorithm>
#include <cmath>

namespace gnls {

GapCertificate certify(const ModelParams& mp, const BoundOptions& opts) {
  GapCertificate out;
  static_cast<Certificate<double>&>(out) = certify_pipeline<double>(mp, opts);
  const bool witten_units = mp.beta == 1.0 && mp.m == 1.0 && std::abs(mp.L - 2 * std::numbers::pi) < 1e-12;
  if (witten_units && mp.r > 3 && mp.kappa > 0) {
    // Witten-Hessian normalisation: lambda_w = lambda / (2 pi), r_w = r - 1. The bound
    // increases with eps, so take the largest admissible eps = 1 - 2 / r_w.
    const double rw = mp.r - 1;
    const double eps = 1 - 2 / rw;
    out.witten_e1 = witten_gap_bound(mp.lambda / (2 * std::numbers::pi), mp.kappa, rw, eps);
    if (out.witten_e1->certified) out.witten_rate_bound = out.witten_e1->value / 2;
  }
  return out;
}

WittenBound witten_gap_bound(double lambda, double kappa, double r, double eps) {
  if (!(eps > 0 && eps < 1)) throw ConfigError("eps must lie in (0, 1)");
  if (!(r >= 2 / (1 - eps))) throw ConfigError("need r >= 2/(1-eps)");
  if (!(lambda >= 0)) throw ConfigError("lambda must be nonnegative");
  if (!(kappa > 0)) throw ConfigError("kappa must be positive");
  WittenBound w;
  w.epsilon = eps;
  w.K = std::pow(lambda / (kappa * r * eps), 1 / (r - 1));
  w.value = 1 - std::pow(lambda / eps, r / (r - 1)) * ((r - 1) / r) * std::pow(kappa * r, -1 / (r - 1));
  w.certified = w.value > 0;
  return w;
}

double chi(double t) {
  if (t <= 1) return 1;
  if (t >= 2) return 0;
  const double v = t - 1;
  return 1 - v * v * v * (10 - 15 * v + 6 * v * v);
}

double chi_prime(double t) {
  if (t <= 1 || t >= 2) return 0;
  const double v = t - 1;
  return -30 * v * v * (1 - v) * (1 - v);
}

double chi_second(double t) {
  if (t <= 1 || t >= 2) return 0;
  const double v = t - 1;
  return -60 * v * (1 - v) * (1 - 2 * v);
}

double chi_R(double t, double R) { return chi(t / R); }

int effective_cutoff(const PerturbationSpec<double>& ps, int N) {
  if (!ps.n) return -1;
  return *ps.n >= N ? N : static_cast<int>(*ps.n);
}

namespace {

struct WTerms {
  double F1;  // chi_R + T chi_R'
  double F2;  // 2 chi_R' + T chi_R''
  double T;
};

WTerms w_terms(double T, double R) {
  const double u = T / R;
  const double c1 = chi_prime(u) / R;
  const double c2 = chi_second(u) / (R * R);
  return {chi(u) + T * c1, 2 * c1 + T * c2, T};
}

}  // namespace

double w_value(const SpectralField& f, const PerturbationSpec<double>& ps) {
  const int n = effective_cutoff(ps, f.modes());
  if (n < 0 || ps.c == 0) return 0;
  const double T = l2sq(project(f, n, Part::low));
  return 0.5 * ps.c * T * chi_R(T, ps.R);
}

double w_sup(const PerturbationSpec<double>& ps) { return ps.active() ? ps.c * ps.R : 0.0; }

double w_hessian_quadform(const SpectralField& f, const SpectralField& eta, const PerturbationSpec<double>& ps) {
  const int n = effective_cutoff(ps, f.modes());
  if (n < 0 || ps.c == 0) return 0;
  const auto pf = project(f, n, Part::low);
  const auto pe = project(eta, n, Part::low);
  const auto w = w_terms(l2sq(pf), ps.R);
  const double p = real_inner(pf, pe);
  return ps.c * (w.F1 * l2sq(pe) + 2 * w.F2 * p * p);
}

double w_remainder(const SpectralField& f, const SpectralField& eta, const PerturbationSpec<double>& ps) {
  const int n = effective_cutoff(ps, f.modes());
  if (n < 0 || ps.c == 0) return 0;
  const auto pf = project(f, n, Part::low);
  const auto pe = project(eta, n, Part::low);
  const double T = l2sq(pf);
  const double u = T / ps.R;
  const double g1 = T * chi_prime(u) / ps.R;
  const double g2 = 2 * (2 * chi_prime(u) / ps.R + T * chi_second(u) / (ps.R * ps.R));
  const double p = real_inner(pf, pe);
  return std::abs(ps.c * g1 * l2sq(pe) + ps.c * g2 * p * p);
}

double hessian_lower_bound_check(const SpectralField& f, const SpectralField& eta, const ModelParams& mp,
                                 const BoundConfig<double>& bc, const PerturbationSpec<double>& ps) {
  HamiltonianEvaluator ev(mp, f.modes());
  return ev.hessian_quadform(f, eta, Term::Full) + w_hessian_quadform(f, eta, ps) -
         bc.alpha * ev.hessian_quadform(f, eta, Term::H0);
}

double mode_split_bound(const SpectralField& f, const BoundConfig<double>& bc, double Csq, int n) {
  if (n < 0) throw std::invalid_argument("cutoff must be nonnegative");
  const double L = f.length();
  const int N = f.modes();
  double low2 = 0, lowA = 0, high2 = 0, highA = 0;
  for (int k = -N; k <= N; ++k) {
    const double w = std::norm(f[k]);
    const double a = bc.a * bc.a / (L * L) + std::pow(f.wavenumber(k), 2);
    if (std::abs(k) <= n) {
      low2 += w;
      lowA += a * w;
    } else {
      high2 += w;
      highA += a * w;
    }
  }
  const double g = bc.gamma, ge = bc.gamma + bc.epsilon;
  double bound = 0;
  if (low2 > 0) bound += std::pow(low2, 1 - 2 * g) * std::pow(lowA, 2 * g);
  if (high2 > 0) {
    if (n == 0) return std::numeric_limits<double>::infinity();
    bound += std::pow(2 * std::numbers::pi * n / L, -4 * bc.epsilon) * std::pow(high2, 1 - 2 * ge) *
             std::pow(highA, 2 * ge);
  }
  return Csq * std::pow(L, 4 * g - 1) * bound;
}

double low_mode_scan_value(const ModelParams& mp, const Selection<double>& sel, double S, double T) {
  const auto& bc = sel.config;
  const auto& ps = sel.perturbation;
  const double A = std::pow(3 * mp.lambda * sel.sobolev_sq * std::pow(mp.L, 4 * bc.gamma - 1), 1 / (1 - 2 * bc.gamma));
  double v = (1 - bc.alpha) * bc.m_a_sq - A * std::pow(S, 1 / (1 - 2 * bc.gamma)) +
             mp.kappa * mp.r * std::pow(S, mp.r - 1);
  if (ps.active() && ps.c > 0) {
    const double u = T / ps.R;
    const double g1 = T * chi_prime(u) / ps.R;
    const double g2 = 2 * (2 * chi_prime(u) / ps.R + T * chi_second(u) / (ps.R * ps.R));
    v += ps.c * (chi(u) + g1 + std::min(0.0, T * g2));
  }
  return v;
}

double young_lower_bound(double b, double c, double q) {
  return -(q / (1 + q)) * std::pow((1 + q) * b, -1 / q) * std::pow(c, (q + 1) / q);
}

}  // namespace gnls
