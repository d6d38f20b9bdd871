#pragma once

// Shared helpers for the unit tests: random inputs and brute-force oracles
// that do not go through the library's FFT paths.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "gnls/field.hpp"
#include "gnls/hamiltonian.hpp"

namespace gnls::test {

using cplx = std::complex<double>;
inline constexpr double kTwoPi = 2 * std::numbers::pi;

inline double rel_err(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0 ? 0.0 : std::abs(a - b) / s;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double normal() { return normal_(eng_); }
  double uniform(double lo = 0, double hi = 1) { return lo + (hi - lo) * uniform_(eng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }

 private:
  std::mt19937_64 eng_;
  std::normal_distribution<double> normal_;
  std::uniform_real_distribution<double> uniform_;
};

/// Coefficients with amplitude decaying like (1 + k^2)^{-1/2}, scaled by amp.
inline SpectralField random_field(int N, double L, Rng& rng, double amp = 1.0) {
  SpectralField f(N, L);
  for (int k = -N; k <= N; ++k) {
    const double s = amp / std::sqrt(1.0 + k * k);
    f[k] = s * cplx(rng.normal(), rng.normal());
  }
  return f;
}

inline ModelParams model(double lambda, double kappa, double r, double L = kTwoPi, double s = 1.0) {
  ModelParams mp;
  mp.lambda = lambda;
  mp.kappa = kappa;
  mp.r = r;
  mp.L = L;
  mp.s = s;
  return mp;
}

/// phi(x) by direct summation.
inline cplx evaluate_at(const SpectralField& f, double x) {
  const int N = f.modes();
  const double L = f.length();
  cplx acc = 0;
  for (int k = -N; k <= N; ++k) acc += f[k] * std::polar(1.0, kTwoPi * k * x / L);
  return acc / std::sqrt(L);
}

/// Left Riemann sum of g(phi(x), phi'(x)) over M points, with phi and phi'
/// evaluated by direct summation using rotating phases.
template <class G>
double riemann(const SpectralField& f, long M, G&& g) {
  const int N = f.modes();
  const double L = f.length();
  std::vector<cplx> step(2 * N + 1), phase(2 * N + 1, cplx(1.0));
  for (int k = -N; k <= N; ++k) step[k + N] = std::polar(1.0, kTwoPi * k / static_cast<double>(M));
  const double norm = 1 / std::sqrt(L);
  double acc = 0;
  for (long j = 0; j < M; ++j) {
    cplx v = 0, d = 0;
    for (int k = -N; k <= N; ++k) {
      const cplx t = f[k] * phase[k + N];
      v += t;
      d += cplx(0, kTwoPi * k / L) * t;
      phase[k + N] *= step[k + N];
    }
    if (j % 4096 == 4095)  // keep the phases on the unit circle
      for (int k = -N; k <= N; ++k) phase[k + N] = std::polar(1.0, kTwoPi * k * (j + 1) / static_cast<double>(M));
    acc += g(v * norm, d * norm);
  }
  return acc * L / static_cast<double>(M);
}

/// sum over k1 - k2 + k3 - k4 = 0 of a_k1 conj(a_k2) a_k3 conj(a_k4), by direct O(N^3) convolution.
inline double direct_quartic_sum(const std::vector<cplx>& a) {
  const int N = (static_cast<int>(a.size()) - 1) / 2;
  auto at = [&](int k) { return std::abs(k) <= N ? a[k + N] : cplx(0); };
  cplx acc = 0;
  for (int k1 = -N; k1 <= N; ++k1)
    for (int k2 = -N; k2 <= N; ++k2)
      for (int k3 = -N; k3 <= N; ++k3) acc += at(k1) * std::conj(at(k2)) * at(k3) * std::conj(at(k1 - k2 + k3));
  return acc.real();
}

inline std::vector<cplx> coeff_vector(const SpectralField& f) { return {f.coeffs().begin(), f.coeffs().end()}; }

}  // namespace gnls::test
