#pragma once

#include <cstdint>
#include <vector>

#include "gnls/field.hpp"
#include "gnls/hamiltonian.hpp"
#include "gnls/rng.hpp"

namespace gnls {

// Densities are taken relative to Lebesgue measure on (Re c_k, Im c_k).
// The Gibbs weight is exp(-2 beta H); this makes the free part match the
// covariance E|c_k|^2 = 1/(beta omega_k).

struct ChainConfig {
  double step = 0.05;
  int burn_in = 1000;
  int thin = 10;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Draw from the free Gaussian measure: independent modes with E|c_k|^2 = 1/(beta omega_k).
SpectralField sample_free(const ModelParams& mp, int N, GaussianStream& rng);

/// log dmu/dmu0 up to the normalizing constant: -2 beta (H - H0).
double log_density_ratio(const SpectralField& f, const ModelParams& mp);

/// Metropolis-adjusted Langevin kernel preconditioned by the noise metric sigma^2.
/// Proposal: y = x + h b(x) + sqrt(h) sigma xi, b = -(beta/2) sigma^2 grad H, E|xi|^2 = 1.
class MalaKernel {
 public:
  MalaKernel(const ModelParams& mp, int N);

  void reset(const SpectralField& x);
  const SpectralField& state() const noexcept { return x_; }

  /// One proposal and accept/reject. Returns true on acceptance.
  bool step(double h, GaussianStream& rng);

  /// log of pi(y) q(x|y) / (pi(x) q(y|x)); stateless apart from scratch.
  double log_accept_ratio(const SpectralField& x, const SpectralField& y, double h);

 private:
  double log_q(const SpectralField& to, const SpectralField& from, const SpectralField& grad_from, double h) const;

  ModelParams mp_;
  int N_;
  HamiltonianEvaluator eval_;
  std::vector<double> sigma2_;
  SpectralField x_, gx_, y_, gy_;
  double hx_ = 0;
  std::vector<double> noise_;
};

struct GibbsSamples {
  std::vector<SpectralField> samples;
  double acceptance = 0;   // after burn-in
  double tuned_step = 0;
  bool mistuned = false;   // acceptance below 5%
};

/// One chain started from the zero field, step tuned towards 55% acceptance
/// during burn-in and frozen afterwards. The chain index selects the RNG stream.
GibbsSamples sample_gibbs(const ModelParams& mp, int N, const ChainConfig& cc, int count, std::uint64_t chain = 0);

}  // namespace gnls
