#pragma once

#include <vector>

#include "gnls/field.hpp"

namespace gnls {

/// Couplings and scales of
///   H = 1/2 sum_k omega_k |c_k|^2 - (lambda/4) int |phi|^4 + (kappa/2r) ||phi||_2^{2r},
/// with omega_k = m^2 + (2 pi k / L)^2, inverse temperature beta and noise exponent s.
struct ModelParams {
  double lambda = 0.0;
  double kappa = 0.0;
  double r = 6.0;
  double m = 1.0;
  double beta = 1.0;
  double L = 1.0;
  double s = 1.0;

  /// Throws ConfigError if the Gibbs measure would not be normalizable
  /// or a scale is out of range.
  void validate() const;

  double omega(int k) const noexcept;
  /// Noise metric sigma^2_k = (beta omega_k)^{-s}.
  double sigma2(int k) const noexcept;
};

enum class Term { H0, V1, V2, Full };

/// Holds FFT scratch for one mode count; reuse within a thread, one per thread.
class HamiltonianEvaluator {
 public:
  HamiltonianEvaluator(const ModelParams& mp, int N);

  const ModelParams& params() const noexcept { return mp_; }
  int modes() const noexcept { return N_; }
  int grid_size() const noexcept { return M_; }

  double h0(const SpectralField& f) const;
  double v1(const SpectralField& f);
  double v2(const SpectralField& f) const;
  double energy(const SpectralField& f);

  /// Real gradient: d/dt H(f + t eta) = Re <G, eta>.
  void gradient(const SpectralField& f, SpectralField& out);
  /// (|phi|^2 phi)^ in the coefficient normalization; out must have f's shape.
  void cubic(const SpectralField& f, SpectralField& out);

  /// d^2/dt^2 of the selected term along eta (lambda, kappa not applied except for Full).
  double hessian_quadform(const SpectralField& f, const SpectralField& eta, Term term);

 private:
  void check(const SpectralField& f) const;
  void to_grid(const SpectralField& f, std::vector<cplx>& grid);

  ModelParams mp_;
  int N_;
  int M_;
  std::vector<double> omega_;
  std::vector<cplx> spec_, grid_a_, grid_b_;
};

double h0(const SpectralField& f, const ModelParams& mp);
double v1(const SpectralField& f);
double v2(const SpectralField& f, double r);
double hamiltonian(const SpectralField& f, const ModelParams& mp);
SpectralField gradient(const SpectralField& f, const ModelParams& mp);
double hessian_quadform(const SpectralField& f, const SpectralField& eta, const ModelParams& mp, Term term);

}  // namespace gnls
