#include "gnls/dynamics.hpp"

#include <cmath>
#include <regex>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "gnls/errors.hpp"

namespace gnls {

Observable Observable::parse(const std::string& name) {
  static const std::regex mode_re(R"(\s*mode_(re|im|sq)\(\s*(-?\d+)\s*\)\s*)");
  std::smatch m;
  if (std::regex_match(name, m, mode_re)) {
    Observable o;
    o.kind = m[1] == "re" ? Kind::ModeRe : m[1] == "im" ? Kind::ModeIm : Kind::ModeSq;
    o.k = std::stoi(m[2]);
    return o;
  }
  if (name == "l2sq") return {Kind::L2sq, 0};
  if (name == "h0") return {Kind::H0, 0};
  if (name == "hamiltonian") return {Kind::Hamiltonian, 0};
  throw ConfigError("unknown observable: " + name);
}

std::string Observable::name() const {
  switch (kind) {
    case Kind::ModeRe: return "mode_re(" + std::to_string(k) + ")";
    case Kind::ModeIm: return "mode_im(" + std::to_string(k) + ")";
    case Kind::ModeSq: return "mode_sq(" + std::to_string(k) + ")";
    case Kind::L2sq: return "l2sq";
    case Kind::H0: return "h0";
    case Kind::Hamiltonian: return "hamiltonian";
  }
  return "?";
}

double Observable::evaluate(const SpectralField& f, HamiltonianEvaluator& ev) const {
  switch (kind) {
    case Kind::ModeRe: return f[k].real();
    case Kind::ModeIm: return f[k].imag();
    case Kind::ModeSq: return std::norm(f[k]);
    case Kind::L2sq: return l2sq(f);
    case Kind::H0: return ev.h0(f);
    case Kind::Hamiltonian: return ev.energy(f);
  }
  return 0;
}

void SimConfig::validate() const {
  if (!(dt > 0)) throw ConfigError("dt must be positive");
  if (!(t_final >= dt)) throw ConfigError("t_final must be at least dt");
  if (scheme != "strang") throw ConfigError("unknown scheme: " + scheme);
  if (record_every < 1) throw ConfigError("record_every must be at least 1");
  if (!(l2_cap > 0)) throw ConfigError("l2_cap must be positive");
}

long SimConfig::steps() const { return std::lround(t_final / dt); }

SpectralField drift(const SpectralField& f, const ModelParams& mp) {
  SpectralField g = gradient(f, mp);
  const int N = f.modes();
  for (int k = -N; k <= N; ++k) g[k] *= cplx(-0.5 * mp.beta * mp.sigma2(k), 1.0);
  return g;
}

SplitStepIntegrator::SplitStepIntegrator(const ModelParams& mp, int N, const SimConfig& sc)
    : mp_(mp),
      sc_(sc),
      N_(N),
      eval_(mp, N),
      normals_(static_cast<std::size_t>(2 * (2 * N + 1))),
      k1_(N, mp.L),
      mid_(N, mp.L),
      cub_(N, mp.L) {
  sc.validate();
  const double tau = 0.5 * sc.dt;
  for (int k = -N; k <= N; ++k) {
    const double w = mp.omega(k);
    const double s2 = mp.sigma2(k);
    const double gamma = sc.damping ? 0.5 * mp.beta * s2 * w : 0.0;
    sigma2_.push_back(s2);
    coef_.push_back(cplx(sc.damping ? -0.5 * mp.beta * s2 : 0.0, sc.rotation ? 1.0 : 0.0));
    mult_.push_back(std::exp(cplx(-gamma * tau, sc.rotation ? w * tau : 0.0)));
    double var = 0;
    if (sc.noise) var = gamma > 0 ? -s2 / (2 * gamma) * std::expm1(-2 * gamma * tau) : s2 * tau;
    var_.push_back(var);
  }
}

void SplitStepIntegrator::linear_half_step(SpectralField& f, NormalSource& noise) {
  auto c = f.coeffs();
  if (sc_.noise) {
    noise.fill(normals_);
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double sd = std::sqrt(0.5 * var_[i]);
      c[i] = mult_[i] * c[i] + sd * cplx(normals_[2 * i], normals_[2 * i + 1]);
    }
  } else {
    for (std::size_t i = 0; i < c.size(); ++i) c[i] *= mult_[i];
  }
}

void SplitStepIntegrator::nonlinear_drift(const SpectralField& f, SpectralField& out) {
  // Cubic part only; the stabiliser is applied through exponentials in step().
  eval_.cubic(f, cub_);
  auto o = out.coeffs();
  auto q = cub_.coeffs();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = -coef_[i] * mp_.lambda * q[i];
}

// Rate kappa S_m^{r-1} at the half-step norm S_m of the predictor
//   m_k = exp(a_k kappa S_m^{r-1} dt/2) c_k + (dt/2) d_k,  S_m = sum |m_k|^2,
// with d the cubic drift at the start of the step. Any root lies in [0, sum (|c_k| + dt/2 |d_k|)^2].
// Freezing S at the start instead lets the full step run with almost no damping
// whenever the predictor collapses, and dropping d costs an order of accuracy.
double SplitStepIntegrator::midpoint_rate(std::span<const cplx> c, std::span<const cplx> d) const {
  if (mp_.kappa == 0) return 0.0;
  const double h = 0.5 * sc_.dt;
  double upper = 0;
  for (std::size_t i = 0; i < c.size(); ++i) upper += std::pow(std::abs(c[i]) + (d.empty() ? 0.0 : h * std::abs(d[i])), 2);
  if (upper == 0) return 0.0;
  auto excess = [&](double x) {
    const double rate = stabiliser_rate(x);
    double acc = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      const cplx m = std::exp(coef_[i] * (rate * h)) * c[i] + (d.empty() ? cplx(0) : h * d[i]);
      acc += std::norm(m);
    }
    return x - acc;
  };
  const double top = excess(upper);
  if (top == 0) return stabiliser_rate(upper);
  std::uintmax_t iters = 100;
  const auto root = boost::math::tools::toms748_solve(excess, 0.0, upper, excess(0.0), top,
                                                      boost::math::tools::eps_tolerance<double>(50), iters);
  return stabiliser_rate(0.5 * (root.first + root.second));
}

double SplitStepIntegrator::stabiliser_rate(double S) const {
  return mp_.kappa != 0 ? mp_.kappa * std::pow(S, mp_.r - 1) : 0.0;
}

// Exponential midpoint for the nonlinear drift a_k (kappa S^{r-1} c_k - lambda (|phi|^2 phi)_k):
// the stabiliser is a scalar multiple of c, so it is integrated by exp(a_k kappa S_m^{r-1} t)
// with S_m the implicit half-step norm, which stays stable when S^{r-1} is large.
void SplitStepIntegrator::step(SpectralField& f, NormalSource& noise) {
  linear_half_step(f, noise);
  if (mp_.lambda != 0 || mp_.kappa != 0) {
    const double dt = sc_.dt;
    auto c = f.coeffs();
    if (mp_.lambda != 0) {
      auto m = mid_.coeffs();
      auto d = k1_.coeffs();
      nonlinear_drift(f, k1_);
      const double sm = midpoint_rate(c, d);
      for (std::size_t i = 0; i < c.size(); ++i) m[i] = std::exp(coef_[i] * (sm * 0.5 * dt)) * c[i] + 0.5 * dt * d[i];
      nonlinear_drift(mid_, k1_);
      for (std::size_t i = 0; i < c.size(); ++i) {
        const cplx half = std::exp(coef_[i] * (sm * 0.5 * dt));
        c[i] = half * half * c[i] + dt * half * d[i];
      }
    } else {
      const double sm = midpoint_rate(c, {});
      for (std::size_t i = 0; i < c.size(); ++i) c[i] *= std::exp(coef_[i] * (sm * dt));
    }
  }
  linear_half_step(f, noise);
}

TimeSeries simulate(const SpectralField& f0, const ModelParams& mp, const SimConfig& sc, std::uint64_t stream) {
  mp.validate();
  SplitStepIntegrator integ(mp, f0.modes(), sc);
  GaussianStream rng(sc.seed, stream);
  TimeSeries ts;
  for (const auto& o : sc.observables) ts.names.push_back(o.name());
  ts.values.resize(sc.observables.size());
  SpectralField f = f0;
  auto record = [&](double t) {
    ts.t.push_back(t);
    for (std::size_t o = 0; o < sc.observables.size(); ++o)
      ts.values[o].push_back(sc.observables[o].evaluate(f, integ.evaluator()));
  };
  record(0.0);
  const long n = sc.steps();
  for (long i = 1; i <= n; ++i) {
    integ.step(f, rng);
    const double S = l2sq(f);
    if (!(S <= sc.l2_cap)) {
      std::ostringstream msg;
      msg << "trajectory exceeded the L2 cap at t = " << i * sc.dt << " (||phi||^2 = " << S << ")";
      throw BlowUpError(msg.str(), i * sc.dt, S);
    }
    if (i % sc.record_every == 0) record(i * sc.dt);
  }
  return ts;
}

}  // namespace gnls
