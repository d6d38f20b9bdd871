#include "gnls/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gnls/errors.hpp"

namespace gnls {

void ModelParams::validate() const {
  auto finite = [](double x) { return std::isfinite(x); };
  if (!(finite(lambda) && finite(kappa) && finite(r) && finite(m) && finite(beta) && finite(L) && finite(s)))
    throw ConfigError("model parameters must be finite");
  if (lambda < 0) throw ConfigError("lambda must be nonnegative");
  if (kappa < 0) throw ConfigError("kappa must be nonnegative");
  if (r < 1) throw ConfigError("r must be at least 1");
  if (lambda > 0 && !(kappa > 0)) throw ConfigError("lambda > 0 requires kappa > 0");
  if (lambda > 0 && !(r > 5)) throw ConfigError("lambda > 0 requires r > 5");
  if (!(m > 0)) throw ConfigError("m must be positive");
  if (!(beta > 0)) throw ConfigError("beta must be positive");
  if (!(L > 0)) throw ConfigError("L must be positive");
  if (!(s > 0 && s <= 1)) throw ConfigError("s must lie in (0, 1]");
}

double ModelParams::omega(int k) const noexcept {
  const double q = 2.0 * std::numbers::pi * k / L;
  return m * m + q * q;
}

double ModelParams::sigma2(int k) const noexcept { return std::pow(beta * omega(k), -s); }

HamiltonianEvaluator::HamiltonianEvaluator(const ModelParams& mp, int N)
    : mp_(mp), N_(N), M_(dealiased_grid_size(N)) {
  if (N < 0) throw ConfigError("mode cutoff must be nonnegative");
  omega_.resize(static_cast<std::size_t>(2 * N + 1));
  for (int k = -N; k <= N; ++k) omega_[static_cast<std::size_t>(k + N)] = mp.omega(k);
  spec_.resize(static_cast<std::size_t>(M_));
  grid_a_.resize(static_cast<std::size_t>(M_));
  grid_b_.resize(static_cast<std::size_t>(M_));
}

void HamiltonianEvaluator::check(const SpectralField& f) const {
  if (f.modes() != N_) throw std::invalid_argument("field has wrong mode count");
  if (std::abs(f.length() - mp_.L) > 1e-12 * mp_.L) throw std::invalid_argument("field length differs from L");
}

void HamiltonianEvaluator::to_grid(const SpectralField& f, std::vector<cplx>& grid) {
  check(f);
  std::fill(spec_.begin(), spec_.end(), cplx{});
  const double scale = 1.0 / std::sqrt(f.length());
  for (int k = -N_; k <= N_; ++k) spec_[static_cast<std::size_t>((k + M_) % M_)] = f[k] * scale;
  fourier::backward(spec_, grid);
}

double HamiltonianEvaluator::h0(const SpectralField& f) const {
  check(f);
  double e = 0;
  auto c = f.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i) e += omega_[i] * std::norm(c[i]);
  return 0.5 * e;
}

double HamiltonianEvaluator::v1(const SpectralField& f) {
  to_grid(f, grid_a_);
  double q = 0;
  for (auto u : grid_a_) q += std::pow(std::norm(u), 2);
  return 0.25 * q * f.length() / M_;
}

double HamiltonianEvaluator::v2(const SpectralField& f) const { return std::pow(l2sq(f), mp_.r) / (2 * mp_.r); }

double HamiltonianEvaluator::energy(const SpectralField& f) {
  double e = h0(f);
  if (mp_.lambda != 0) e -= mp_.lambda * v1(f);
  if (mp_.kappa != 0) e += mp_.kappa * v2(f);
  return e;
}

void HamiltonianEvaluator::cubic(const SpectralField& f, SpectralField& out) {
  to_grid(f, grid_a_);
  for (auto& u : grid_a_) u *= std::norm(u);
  fourier::forward(grid_a_, spec_);
  const double scale = std::sqrt(f.length()) / M_;
  for (int k = -N_; k <= N_; ++k) out[k] = spec_[static_cast<std::size_t>((k + M_) % M_)] * scale;
}

void HamiltonianEvaluator::gradient(const SpectralField& f, SpectralField& out) {
  check(f);
  if (!out.same_shape(f)) out = SpectralField(f.modes(), f.length());
  if (mp_.lambda != 0) {
    cubic(f, out);
    out *= -mp_.lambda;
  } else {
    out *= 0.0;
  }
  const double stab = mp_.kappa != 0 ? mp_.kappa * std::pow(l2sq(f), mp_.r - 1) : 0.0;
  auto c = f.coeffs();
  auto g = out.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i) g[i] += (omega_[i] + stab) * c[i];
}

double HamiltonianEvaluator::hessian_quadform(const SpectralField& f, const SpectralField& eta, Term term) {
  if (!f.same_shape(eta)) throw std::invalid_argument("field shape mismatch");
  const double r = mp_.r;
  auto quad_h0 = [&] { return 2 * h0(eta); };
  auto quad_v1 = [&] {
    to_grid(f, grid_a_);
    to_grid(eta, grid_b_);
    double q = 0;
    for (int j = 0; j < M_; ++j) {
      const cplx p = grid_a_[static_cast<std::size_t>(j)];
      const cplx e = grid_b_[static_cast<std::size_t>(j)];
      q += 2 * std::norm(p) * std::norm(e) + (std::conj(p * p) * e * e).real();
    }
    return q * f.length() / M_;
  };
  auto quad_v2 = [&] {
    const double S = l2sq(f);
    const double pe = real_inner(f, eta);
    double q = std::pow(S, r - 1) * l2sq(eta);
    if (pe != 0) q += 2 * (r - 1) * std::pow(S, r - 2) * pe * pe;
    return q;
  };
  switch (term) {
    case Term::H0: return quad_h0();
    case Term::V1: return quad_v1();
    case Term::V2: return quad_v2();
    case Term::Full: {
      double q = quad_h0();
      if (mp_.lambda != 0) q -= mp_.lambda * quad_v1();
      if (mp_.kappa != 0) q += mp_.kappa * quad_v2();
      return q;
    }
  }
  return 0;
}

double h0(const SpectralField& f, const ModelParams& mp) { return HamiltonianEvaluator(mp, f.modes()).h0(f); }

double v1(const SpectralField& f) {
  ModelParams mp;
  mp.L = f.length();
  return HamiltonianEvaluator(mp, f.modes()).v1(f);
}

double v2(const SpectralField& f, double r) { return std::pow(l2sq(f), r) / (2 * r); }

double hamiltonian(const SpectralField& f, const ModelParams& mp) {
  return HamiltonianEvaluator(mp, f.modes()).energy(f);
}

SpectralField gradient(const SpectralField& f, const ModelParams& mp) {
  SpectralField out(f.modes(), f.length());
  HamiltonianEvaluator(mp, f.modes()).gradient(f, out);
  return out;
}

double hessian_quadform(const SpectralField& f, const SpectralField& eta, const ModelParams& mp, Term term) {
  return HamiltonianEvaluator(mp, f.modes()).hessian_quadform(f, eta, term);
}

}  // namespace gnls
