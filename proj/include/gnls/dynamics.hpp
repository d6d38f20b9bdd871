#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gnls/field.hpp"
#include "gnls/hamiltonian.hpp"
#include "gnls/rng.hpp"

namespace gnls {

/// Scalar functional recorded along trajectories.
struct Observable {
  enum class Kind { ModeRe, ModeIm, ModeSq, L2sq, H0, Hamiltonian };
  Kind kind = Kind::L2sq;
  int k = 0;

  /// Parses "mode_re(k)", "mode_im(k)", "mode_sq(k)", "l2sq", "h0", "hamiltonian".
  static Observable parse(const std::string& name);
  std::string name() const;
  double evaluate(const SpectralField& f, HamiltonianEvaluator& ev) const;
};

struct SimConfig {
  double dt = 0.005;
  double t_final = 1.0;
  std::string scheme = "strang";
  std::uint64_t seed = 0;
  std::vector<Observable> observables;
  /// Record every this many steps (step 0 is always recorded).
  int record_every = 1;
  double l2_cap = 1e6;
  // Switches used by tests and diagnostics.
  bool noise = true;
  bool damping = true;
  bool rotation = true;

  void validate() const;
  long steps() const;
};

/// i G - (beta/2) sigma^2 G with G the real gradient of H.
SpectralField drift(const SpectralField& f, const ModelParams& mp);

/// Strang splitting: exact half-step of the linear rotation + Ornstein-Uhlenbeck
/// flow, exponential midpoint step of the nonlinear drift, exact half-step again.
class SplitStepIntegrator {
 public:
  SplitStepIntegrator(const ModelParams& mp, int N, const SimConfig& sc);

  void step(SpectralField& f, NormalSource& noise);
  /// One exact linear half-step; exposed for checking the OU maps.
  void linear_half_step(SpectralField& f, NormalSource& noise);

  /// Multiplier and per-mode complex noise variance of a linear half-step.
  cplx half_multiplier(int k) const { return mult_[static_cast<std::size_t>(k + N_)]; }
  double half_noise_variance(int k) const { return var_[static_cast<std::size_t>(k + N_)]; }

  HamiltonianEvaluator& evaluator() noexcept { return eval_; }

 private:
  void nonlinear_drift(const SpectralField& f, SpectralField& out);
  double stabiliser_rate(double S) const;
  double midpoint_rate(std::span<const cplx> c, std::span<const cplx> d) const;

  ModelParams mp_;
  SimConfig sc_;
  int N_;
  HamiltonianEvaluator eval_;
  std::vector<double> sigma2_;
  std::vector<cplx> coef_;  // i - (beta/2) sigma^2_k, with the switches applied
  std::vector<cplx> mult_;
  std::vector<double> var_;
  std::vector<double> normals_;
  SpectralField k1_, mid_, cub_;
};

struct TimeSeries {
  std::vector<double> t;
  std::vector<std::string> names;
  /// values[o][i]: observable o at record time i.
  std::vector<std::vector<double>> values;
};

/// One trajectory, noise stream selected by (sc.seed, stream).
TimeSeries simulate(const SpectralField& f0, const ModelParams& mp, const SimConfig& sc, std::uint64_t stream = 0);

}  // namespace gnls
