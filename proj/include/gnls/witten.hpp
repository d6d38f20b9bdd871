#pragma once

// Finite-mode Hessian of the truncated Hamiltonian in the normalisation
// beta = m = 1, L = 2 pi, omega_n = n^2 + 1:
//
//   2 Phi(a) = sum (n^2+1)|a_n|^2 - (lambda/2) sum_{n1-n2+n3-n4=0} a a* a a*
//              + (kappa/(r+1)) (sum |a_n|^2)^{r+1}
//
// The blocks are those of A (Hess 2 Phi) A with A = diag((n^2+1)^{-s}), scaled so that
//   d^2/dt^2 2Phi(a + t A u) = 2 (u^H M11 u + Re(u^T-bar M12 u-bar)).

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gnls/hamiltonian.hpp"

namespace gnls {

struct WittenParams {
  double lambda = 0;
  double kappa = 0;
  double r = 9;
  double s = 1;
};

/// Map model parameters to the Witten-Hessian form. Requires beta = m = 1 and L = 2 pi;
/// then lambda_w = lambda / (2 pi), kappa_w = kappa, r_w = r - 1 and a_n = c_n.
WittenParams witten_params_from_model(const ModelParams& mp);

struct WittenHessian {
  int N = 0;
  double s = 1;
  Eigen::MatrixXcd M11;  // Hermitian
  Eigen::MatrixXcd M12;  // complex symmetric
};

/// The quartic sum, evaluated on a dealiased grid.
double quartic_sum(std::span<const std::complex<double>> a);

/// 2 Phi; a has 2N+1 entries indexed n + N.
double phi_truncated(std::span<const std::complex<double>> a, const WittenParams& wp);

/// exact: second derivatives of 2 Phi. reduced: the quartic blocks with the smaller
/// prefactors lambda/2 on both sums, kept only to diagnose the closed-form bound.
enum class QuarticBlocks { exact, reduced };

WittenHessian hessian_blocks(std::span<const std::complex<double>> a, const WittenParams& wp,
                             QuarticBlocks quartic = QuarticBlocks::exact);

/// Real symmetric 2(2N+1) form [[R+P, Q-I], [I+Q, R-P]] with M11 = R + iI, M12 = P + iQ.
Eigen::MatrixXd real_form(const WittenHessian& h);

/// Eigenvalues of the pencil K v = c G v, G = diag(A, A), ascending.
Eigen::VectorXd pencil_eigenvalues(const WittenHessian& h);
double pencil_min(const WittenHessian& h);

struct MarginResult {
  double c_hat = 0;
  std::size_t worst_index = 0;
  std::vector<std::complex<double>> worst;
  std::size_t rejected = 0;
  std::vector<std::string> diagnostics;
};

/// Smallest pencil eigenvalue over the samples; non-finite results are skipped and reported.
MarginResult min_eig_margin(const std::vector<std::vector<std::complex<double>>>& samples, const WittenParams& wp);

}  // namespace gnls
