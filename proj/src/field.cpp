#include "gnls/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gnls/errors.hpp"

namespace gnls {

SpectralField::SpectralField(int N, double L) : N_(N), L_(L), c_(static_cast<std::size_t>(2 * N + 1)) {
  if (N < 0) throw ConfigError("mode cutoff must be nonnegative");
  if (!(L > 0)) throw ConfigError("circumference must be positive");
}

SpectralField::SpectralField(int N, double L, std::vector<cplx> coeffs) : SpectralField(N, L) {
  if (coeffs.size() != c_.size()) throw ConfigError("expected 2N+1 coefficients");
  c_ = std::move(coeffs);
}

double SpectralField::wavenumber(int k) const noexcept { return 2.0 * std::numbers::pi * k / L_; }

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  if (!same_shape(o)) throw std::invalid_argument("field shape mismatch");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  if (!same_shape(o)) throw std::invalid_argument("field shape mismatch");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(cplx s) {
  for (auto& c : c_) c *= s;
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(cplx s, SpectralField a) { return a *= s; }

GridField synthesize(const SpectralField& f, int M) {
  const int N = f.modes();
  if (M < 2 * N + 1) throw std::invalid_argument("grid too small: M must be at least 2N+1");
  std::vector<cplx> spec(static_cast<std::size_t>(M));
  for (int k = -N; k <= N; ++k) spec[static_cast<std::size_t>((k + M) % M)] = f[k];
  GridField g{std::vector<cplx>(static_cast<std::size_t>(M)), f.length()};
  fourier::backward(spec, g.samples);
  const double scale = 1.0 / std::sqrt(f.length());
  for (auto& u : g.samples) u *= scale;
  return g;
}

SpectralField analyze(const GridField& g, int N) {
  const int M = static_cast<int>(g.samples.size());
  if (M < 2 * N + 1) throw std::invalid_argument("grid too small: M must be at least 2N+1");
  std::vector<cplx> spec(static_cast<std::size_t>(M));
  fourier::forward(g.samples, spec);
  SpectralField f(N, g.L);
  const double scale = std::sqrt(g.L) / M;
  for (int k = -N; k <= N; ++k) f[k] = spec[static_cast<std::size_t>((k + M) % M)] * scale;
  return f;
}

double l2sq(const SpectralField& f) {
  double s = 0;
  for (auto c : f.coeffs()) s += std::norm(c);
  return s;
}

cplx inner(const SpectralField& f, const SpectralField& g) {
  if (!f.same_shape(g)) throw std::invalid_argument("field shape mismatch");
  cplx s = 0;
  auto a = f.coeffs();
  auto b = g.coeffs();
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

double real_inner(const SpectralField& f, const SpectralField& g) { return inner(f, g).real(); }

Norms norms(const SpectralField& f, int M) {
  const int N = f.modes();
  if (M == 0) M = dealiased_grid_size(N);
  if (M < 2 * (2 * N + 1) - 1) throw std::invalid_argument("grid too small for quartic quadrature");
  Norms out;
  out.l2 = std::sqrt(l2sq(f));
  double h1 = 0;
  for (int k = -N; k <= N; ++k) h1 += std::pow(f.wavenumber(k), 2) * std::norm(f[k]);
  out.h1_seminorm = std::sqrt(h1);

  const auto g = synthesize(f, M);
  double q = 0;
  for (auto u : g.samples) q += std::pow(std::norm(u), 2);
  out.l4 = std::pow(q * f.length() / M, 0.25);

  const auto fine = synthesize(f, fft_friendly_size(M * out.sup_refinement));
  double sup = 0;
  for (auto u : fine.samples) sup = std::max(sup, std::abs(u));
  out.sup = sup;
  return out;
}

SpectralField project(const SpectralField& f, int n, Part part) {
  if (n < 0) throw std::invalid_argument("projection cutoff must be nonnegative");
  SpectralField out = f;
  const int N = f.modes();
  for (int k = -N; k <= N; ++k) {
    const bool low = std::abs(k) <= n;
    if (low != (part == Part::low)) out[k] = 0;
  }
  return out;
}

void to_json(nlohmann::json& j, const SpectralField& f) {
  std::vector<double> re, im;
  re.reserve(f.size());
  im.reserve(f.size());
  for (auto c : f.coeffs()) {
    re.push_back(c.real());
    im.push_back(c.imag());
  }
  j = nlohmann::json{{"N", f.modes()}, {"L", f.length()}, {"re", re}, {"im", im}};
}

void from_json(const nlohmann::json& j, SpectralField& f) {
  const int N = j.at("N").get<int>();
  const double L = j.at("L").get<double>();
  const auto re = j.at("re").get<std::vector<double>>();
  const auto im = j.at("im").get<std::vector<double>>();
  if (re.size() != im.size() || re.size() != static_cast<std::size_t>(2 * N + 1))
    throw ConfigError("field JSON: re/im must have 2N+1 entries");
  std::vector<cplx> c(re.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = {re[i], im[i]};
  f = SpectralField(N, L, std::move(c));
}

}  // namespace gnls
