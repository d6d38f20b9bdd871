#include "gnls/witten.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "gnls/errors.hpp"
#include "gnls/fourier.hpp"

namespace gnls {

namespace {

int modes_of(std::span<const cplx> a) {
  if (a.size() % 2 == 0) throw std::invalid_argument("expected 2N+1 coefficients");
  return static_cast<int>(a.size() / 2);
}

double norm_sq(std::span<const cplx> a) {
  double s = 0;
  for (auto z : a) s += std::norm(z);
  return s;
}

}  // namespace

WittenParams witten_params_from_model(const ModelParams& mp) {
  if (mp.beta != 1.0 || mp.m != 1.0 || std::abs(mp.L - 2 * std::numbers::pi) > 1e-12)
    throw ConfigError("the Witten Hessian is defined for beta = m = 1 and L = 2 pi");
  return {mp.lambda / (2 * std::numbers::pi), mp.kappa, mp.r - 1, mp.s};
}

double quartic_sum(std::span<const cplx> a) {
  const int N = modes_of(a);
  const int M = dealiased_grid_size(N);
  std::vector<cplx> spec(static_cast<std::size_t>(M)), u(static_cast<std::size_t>(M));
  for (int n = -N; n <= N; ++n) spec[static_cast<std::size_t>((n + M) % M)] = a[static_cast<std::size_t>(n + N)];
  fourier::backward(spec, u);
  double q = 0;
  for (auto z : u) q += std::pow(std::norm(z), 2);
  return q / M;
}

double phi_truncated(std::span<const cplx> a, const WittenParams& wp) {
  const int N = modes_of(a);
  double e = 0;
  for (int n = -N; n <= N; ++n) e += (n * n + 1.0) * std::norm(a[static_cast<std::size_t>(n + N)]);
  if (wp.lambda != 0) e -= 0.5 * wp.lambda * quartic_sum(a);
  if (wp.kappa != 0) e += wp.kappa / (wp.r + 1) * std::pow(norm_sq(a), wp.r + 1);
  return e;
}

WittenHessian hessian_blocks(std::span<const cplx> a, const WittenParams& wp, QuarticBlocks quartic) {
  const int N = modes_of(a);
  const int D = 2 * N + 1;
  auto at = [&](int n) { return a[static_cast<std::size_t>(n + N)]; };

  // conv[d + 2N] = sum_l a_l conj(a_{l+d});  pair[s + 2N] = sum_{l+l'=s} a_l a_l'.
  std::vector<cplx> conv(static_cast<std::size_t>(2 * D - 1)), pair(static_cast<std::size_t>(2 * D - 1));
  for (int l = -N; l <= N; ++l)
    for (int l2 = -N; l2 <= N; ++l2) {
      conv[static_cast<std::size_t>(l2 - l + 2 * N)] += at(l) * std::conj(at(l2));
      pair[static_cast<std::size_t>(l + l2 + 2 * N)] += at(l) * at(l2);
    }

  const double S = norm_sq(a);
  const double Sr = wp.kappa != 0 ? std::pow(S, wp.r) : 0.0;
  const double krS = wp.kappa != 0 ? wp.kappa * wp.r * std::pow(S, wp.r - 1) : 0.0;
  const double bc = quartic == QuarticBlocks::exact ? 2 * wp.lambda : wp.lambda / 2;
  const double bp = quartic == QuarticBlocks::exact ? wp.lambda : wp.lambda / 2;

  WittenHessian h;
  h.N = N;
  h.s = wp.s;
  h.M11.resize(D, D);
  h.M12.resize(D, D);
  for (int j = -N; j <= N; ++j) {
    const double sj = std::pow(j * j + 1.0, -wp.s);
    for (int k = -N; k <= N; ++k) {
      const double sk = std::pow(k * k + 1.0, -wp.s);
      cplx p = -bc * conv[static_cast<std::size_t>(k - j + 2 * N)] + krS * at(j) * std::conj(at(k));
      if (j == k) p += j * j + 1.0 + wp.kappa * Sr;
      const cplx q = -bp * pair[static_cast<std::size_t>(j + k + 2 * N)] + krS * at(j) * at(k);
      h.M11(j + N, k + N) = sj * p * sk;
      h.M12(j + N, k + N) = sj * q * sk;
    }
  }
  return h;
}

Eigen::MatrixXd real_form(const WittenHessian& h) {
  const Eigen::Index D = h.M11.rows();
  const Eigen::MatrixXd R = h.M11.real(), I = h.M11.imag(), P = h.M12.real(), Q = h.M12.imag();
  Eigen::MatrixXd K(2 * D, 2 * D);
  K.topLeftCorner(D, D) = R + P;
  K.topRightCorner(D, D) = Q - I;
  K.bottomLeftCorner(D, D) = I + Q;
  K.bottomRightCorner(D, D) = R - P;
  return 0.5 * (K + K.transpose());
}

Eigen::VectorXd pencil_eigenvalues(const WittenHessian& h) {
  const int N = h.N;
  const Eigen::Index D = 2 * N + 1;
  // G is diagonal, so its Cholesky factor is the square root; reduce to a standard problem.
  Eigen::VectorXd ginv_sqrt(2 * D);
  for (int n = -N; n <= N; ++n) {
    const double g = std::pow(n * n + 1.0, -h.s);
    ginv_sqrt(n + N) = ginv_sqrt(n + N + D) = 1 / std::sqrt(g);
  }
  const Eigen::MatrixXd K = ginv_sqrt.asDiagonal() * real_form(h) * ginv_sqrt.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("pencil eigensolve failed");
  return es.eigenvalues();
}

double pencil_min(const WittenHessian& h) { return pencil_eigenvalues(h)(0); }

MarginResult min_eig_margin(const std::vector<std::vector<cplx>>& samples, const WittenParams& wp) {
  if (samples.empty()) throw std::invalid_argument("min_eig_margin needs at least one sample");
  MarginResult out;
  bool any = false;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double c = pencil_min(hessian_blocks(samples[i], wp));
    if (!std::isfinite(c)) {
      ++out.rejected;
      std::ostringstream msg;
      msg << "sample " << i << ": non-finite pencil eigenvalue";
      out.diagnostics.push_back(msg.str());
      continue;
    }
    if (!any || c < out.c_hat) {
      out.c_hat = c;
      out.worst_index = i;
      any = true;
    }
  }
  if (!any) throw std::runtime_error("every sample was rejected");
  out.worst = samples[out.worst_index];
  return out;
}

}  // namespace gnls
