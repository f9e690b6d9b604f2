#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace eisbfd {

using cplx = std::complex<double>;

/// A low wavenumber and its high-frequency partner on the 2N-node grid.
struct FrequencyPair {
  int omega;
  int nu;
};

/// nu = omega - N for omega > 0, omega + N otherwise. Requires |omega| <= N/2.
FrequencyPair frequency_pair(int omega, int n_cells);

/// Per-node factors of Q acting on exp(i omega x) (mu) and exp(i nu x) (sigma),
/// for the left and right node of each cell.
struct MuSigma {
  cplx mu1, mu2, sigma1, sigma2;
};

MuSigma compute_mu_sigma(int omega, int n_cells, double c, double length = 2 * std::numbers::pi);

/// Eigenpair data of the 2x2 block symbol at one wavenumber.
///
/// q1 is the smooth branch (approximates -omega^2), q2 the rapidly decaying
/// one. Eigenvectors are alpha_k exp(i omega x) + beta_k exp(i nu x), scaled so
/// |alpha_k|^2 + |beta_k|^2 = 1, and r_k = i beta_k / alpha_k. When alpha_k
/// vanishes (omega = 0, or c = 0 on the second branch) r_k is infinite.
struct SymbolPair {
  int omega = 0;
  int nu = 0;
  double q1 = 0, q2 = 0;
  MuSigma ms{};
  cplx r1{}, r2{};
  cplx alpha1{}, beta1{}, alpha2{}, beta2{};
  double Omega = 0, Delta = 0;
  bool degenerate = false;  ///< omega == 0
};

SymbolPair compute_symbols(int omega, int n_cells, double c, double length = 2 * std::numbers::pi);
/// h^2 q1 and h^2 q2 as functions of theta = omega h, for any real type
/// with the usual math functions found by argument-dependent lookup. The
/// smooth branch is written without the cancellation between its two terms,
/// so extended-precision types resolve its small-theta behaviour.
template <class Real>
std::array<Real, 2> scaled_symbols(const Real& theta, const Real& c) {
  using std::cos;
  using std::sin;
  using std::sqrt;
  const Real half_sin = sin(theta / 2);
  const Real x = half_sin * half_sin;
  const Real cs = cos(theta);
  const Real omega_term = -cos(theta / 2) * (16 - (7 + cs) * c);
  const Real delta = sqrt(omega_term * omega_term + 4 * c * c * x * x * x);
  const Real base = -(15 + cs) + (5 + 3 * cs) * c;
  const Real smooth = -4 * x * (48 - 24 * c + x * (1 + 10 * c)) / (delta - base);
  return {Real(2) * smooth / 3, Real(2) * (base - delta) / 3};
}


/// Independent route: eigen-decomposition of A e^{-i omega h} + B + C e^{i omega h}.
/// Eigenvalues are sorted so q1 >= q2; alpha/beta are recovered from the
/// nodal eigenvectors and normalized the same way as the closed form.
SymbolPair symbol_eigenproblem_numeric(int omega, int n_cells, double c,
                                       double length = 2 * std::numbers::pi);

/// All 2N symbols for omega = -N/2+1 .. N/2.
std::vector<double> symbol_spectrum(int n_cells, double c, double length = 2 * std::numbers::pi);

/// Small-h prediction of the semi-discrete solution started from
/// exp(i omega x)/sqrt(2 pi). Valid only for omega^2 h << 1.
Eigen::VectorXcd evolve_single_mode(int omega, int n_cells, double c, double t,
                                    double length = 2 * std::numbers::pi);

/// Leading terms of q1 and q2 for small h omega.
double q1_small_h(int omega, int n_cells, double c, double length = 2 * std::numbers::pi);
double q2_small_h(int omega, int n_cells, double c, double length = 2 * std::numbers::pi);

}  // namespace eisbfd
