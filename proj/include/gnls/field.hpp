#pragma once

#include <complex>
#include <span>
#include <vector>

#include <json.hpp>

#include "gnls/fourier.hpp"

namespace gnls {

/// Truncated Fourier series on a circle of circumference L:
///   phi(x) = L^{-1/2} sum_{|k|<=N} c_k exp(2 pi i k x / L).
/// Coefficients are stored at index k + N.
class SpectralField {
 public:
  SpectralField() = default;
  SpectralField(int N, double L);
  SpectralField(int N, double L, std::vector<cplx> coeffs);

  int modes() const noexcept { return N_; }
  double length() const noexcept { return L_; }
  std::size_t size() const noexcept { return c_.size(); }

  cplx& operator[](int k) { return c_[static_cast<std::size_t>(k + N_)]; }
  const cplx& operator[](int k) const { return c_[static_cast<std::size_t>(k + N_)]; }

  std::span<cplx> coeffs() noexcept { return c_; }
  std::span<const cplx> coeffs() const noexcept { return c_; }

  /// Wavenumber 2 pi k / L.
  double wavenumber(int k) const noexcept;

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(cplx s);

  bool same_shape(const SpectralField& o) const noexcept { return N_ == o.N_ && L_ == o.L_; }

 private:
  int N_ = 0;
  double L_ = 1.0;
  std::vector<cplx> c_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(cplx s, SpectralField a);

struct GridField {
  std::vector<cplx> samples;
  double L = 1.0;
};

/// Real-space samples at x_j = j L / M. Requires M >= 2N+1.
GridField synthesize(const SpectralField& f, int M);

/// Inverse of synthesize on band-limited data; keeps |k| <= N.
SpectralField analyze(const GridField& g, int N);

struct Norms {
  double l2 = 0;
  double l4 = 0;
  double sup = 0;  // lower estimate from a refined grid
  double h1_seminorm = 0;
  int sup_refinement = 8;
};

/// M = 0 selects the dealiased grid for the field's N.
Norms norms(const SpectralField& f, int M = 0);

double l2sq(const SpectralField& f);
/// <f, g> = sum conj(f_k) g_k, i.e. the L2 inner product by Parseval.
cplx inner(const SpectralField& f, const SpectralField& g);
double real_inner(const SpectralField& f, const SpectralField& g);

enum class Part { low, high };

/// P_n (low) or 1 - P_n (high). n > N acts like n = N.
SpectralField project(const SpectralField& f, int n, Part part);

void to_json(nlohmann::json& j, const SpectralField& f);
void from_json(const nlohmann::json& j, SpectralField& f);

}  // namespace gnls
