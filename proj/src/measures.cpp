#include "gnls/measures.hpp"

#include <algorithm>
#include <cmath>

#include "gnls/errors.hpp"

namespace gnls {

void ChainConfig::validate() const {
  if (!(step > 0)) throw ConfigError("chain step must be positive");
  if (burn_in < 1 || thin < 1) throw ConfigError("burn_in and thin must be at least 1");
}

SpectralField sample_free(const ModelParams& mp, int N, GaussianStream& rng) {
  SpectralField f(N, mp.L);
  for (int k = -N; k <= N; ++k) {
    const double sd = std::sqrt(0.5 / (mp.beta * mp.omega(k)));
    const double re = rng.normal();
    const double im = rng.normal();
    f[k] = sd * cplx(re, im);
  }
  return f;
}

double log_density_ratio(const SpectralField& f, const ModelParams& mp) {
  HamiltonianEvaluator ev(mp, f.modes());
  double d = 0;
  if (mp.lambda != 0) d -= mp.lambda * ev.v1(f);
  if (mp.kappa != 0) d += mp.kappa * ev.v2(f);
  return -2 * mp.beta * d;
}

MalaKernel::MalaKernel(const ModelParams& mp, int N)
    : mp_(mp),
      N_(N),
      eval_(mp, N),
      x_(N, mp.L),
      gx_(N, mp.L),
      y_(N, mp.L),
      gy_(N, mp.L),
      noise_(static_cast<std::size_t>(2 * (2 * N + 1))) {
  for (int k = -N; k <= N; ++k) sigma2_.push_back(mp.sigma2(k));
  reset(x_);
}

void MalaKernel::reset(const SpectralField& x) {
  x_ = x;
  hx_ = eval_.energy(x_);
  eval_.gradient(x_, gx_);
}

double MalaKernel::log_q(const SpectralField& to, const SpectralField& from, const SpectralField& grad_from,
                         double h) const {
  const double half_beta = 0.5 * mp_.beta;
  double acc = 0;
  for (std::size_t i = 0; i < sigma2_.size(); ++i) {
    const cplx mean = from.coeffs()[i] - h * half_beta * sigma2_[i] * grad_from.coeffs()[i];
    acc += std::norm(to.coeffs()[i] - mean) / (sigma2_[i] * h);
  }
  return -acc;
}

double MalaKernel::log_accept_ratio(const SpectralField& x, const SpectralField& y, double h) {
  SpectralField gx(N_, mp_.L), gy(N_, mp_.L);
  eval_.gradient(x, gx);
  eval_.gradient(y, gy);
  const double dh = eval_.energy(y) - eval_.energy(x);
  return -2 * mp_.beta * dh + log_q(x, y, gy, h) - log_q(y, x, gx, h);
}

bool MalaKernel::step(double h, GaussianStream& rng) {
  rng.fill(noise_);
  const double half_beta = 0.5 * mp_.beta;
  for (std::size_t i = 0; i < sigma2_.size(); ++i) {
    const double sd = std::sqrt(0.5 * h * sigma2_[i]);
    const cplx xi(noise_[2 * i], noise_[2 * i + 1]);
    y_.coeffs()[i] = x_.coeffs()[i] - h * half_beta * sigma2_[i] * gx_.coeffs()[i] + sd * xi;
  }
  const double hy = eval_.energy(y_);
  if (!std::isfinite(hy)) {
    rng.uniform();
    return false;
  }
  eval_.gradient(y_, gy_);
  const double log_alpha = -2 * mp_.beta * (hy - hx_) + log_q(x_, y_, gy_, h) - log_q(y_, x_, gx_, h);
  const double u = rng.uniform();
  if (std::log(u) < log_alpha) {
    std::swap(x_, y_);
    std::swap(gx_, gy_);
    hx_ = hy;
    return true;
  }
  return false;
}

GibbsSamples sample_gibbs(const ModelParams& mp, int N, const ChainConfig& cc, int count, std::uint64_t chain) {
  mp.validate();
  cc.validate();
  if (count < 0) throw ConfigError("sample count must be nonnegative");
  GaussianStream rng(cc.seed, chain);
  MalaKernel kernel(mp, N);

  // Burn-in with batch tuning: move the step by a factor that is square-rooted
  // whenever the direction of the correction flips.
  constexpr int batch = 50;
  constexpr double target = 0.55;
  double h = cc.step;
  double factor = 2.0;
  int last_dir = 0;
  for (int done = 0; done < cc.burn_in; done += batch) {
    int acc = 0;
    const int len = std::min(batch, cc.burn_in - done);
    for (int i = 0; i < len; ++i) acc += kernel.step(h, rng);
    const double rate = static_cast<double>(acc) / len;
    const int dir = rate > target ? 1 : -1;
    if (last_dir != 0 && dir != last_dir) factor = std::max(1.02, std::sqrt(factor));
    h = dir > 0 ? h * factor : h / factor;
    last_dir = dir;
  }

  GibbsSamples out;
  out.tuned_step = h;
  out.samples.reserve(static_cast<std::size_t>(count));
  long accepted = 0, total = 0;
  for (int s = 0; s < count; ++s) {
    for (int t = 0; t < cc.thin; ++t) {
      accepted += kernel.step(h, rng);
      ++total;
    }
    out.samples.push_back(kernel.state());
  }
  out.acceptance = total > 0 ? static_cast<double>(accepted) / total : 0.0;
  out.mistuned = total > 0 && out.acceptance < 0.05;
  return out;
}

}  // namespace gnls
