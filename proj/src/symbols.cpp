#include "eisbfd/symbols.hpp"

#include <cmath>
#include <limits>

#include "eisbfd/dg_equiv.hpp"
#include "eisbfd/error.hpp"
#include "eisbfd/grid.hpp"

namespace eisbfd {
namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_args(int omega, int n_cells) {
  if (n_cells < 3) throw InvalidSize("symbol analysis needs at least 3 cells");
  if (2 * std::abs(omega) > n_cells) throw InvalidDomain("wavenumber outside [-N/2, N/2]");
}

// Normalized (alpha, beta) from r = i beta / alpha, in the phase convention
// of the closed form. `second` selects the branch-2 convention.
void normalize(cplx r, bool second, cplx& alpha, cplx& beta) {
  const double m = std::abs(r);
  if (std::isinf(m)) {
    alpha = 0.0;
    beta = 1.0;
    return;
  }
  const double s = std::sqrt(1 + m * m);
  if (!second) {
    alpha = 1.0 / s;
    beta = cplx(0, -1) * r / s;
  } else if (m == 0) {
    alpha = 1.0;
    beta = 0.0;
  } else {
    alpha = cplx(0, 1) * (r / m) / s;
    beta = m / s;
  }
}

// Closed form for omega >= 0 on the 2 pi domain.
SymbolPair symbols_nonnegative(int omega, int n, double c) {
  const double h = kTwoPi / n;
  const double hw = h * omega;
  const double s4 = std::sin(hw / 4), c4 = std::cos(hw / 4);
  const double s2 = std::sin(hw / 2), c2 = std::cos(hw / 2);
  const double scale = 8.0 / (3 * h * h);
  const cplx i(0, 1);

  SymbolPair p;
  p.omega = omega;
  p.nu = frequency_pair(omega, n).nu;
  const cplx e = std::exp(i * hw / 4.0);
  p.ms.mu1 = scale * (-s4 * s4 * (7 - c2) - 4.0 * i * c * e * std::pow(s4, 5));
  p.ms.mu2 = scale * (-s4 * s4 * (7 - c2) + 4.0 * i * c * std::conj(e) * std::pow(s4, 5));
  p.ms.sigma1 = scale * (-c4 * c4 * (7 + c2) + 4.0 * c * e * std::pow(c4, 5));
  p.ms.sigma2 = scale * (-c4 * c4 * (7 + c2) + 4.0 * c * std::conj(e) * std::pow(c4, 5));

  p.Omega = -c2 * (16 - (7 + std::cos(hw)) * c);
  p.Delta = std::sqrt(p.Omega * p.Omega + 4 * c * c * std::pow(s2, 6));
  const auto scaled = scaled_symbols(hw, c);
  p.q1 = scaled[0] / (h * h);
  p.q2 = scaled[1] / (h * h);

  // r1 rewritten to avoid the Omega + Delta cancellation; it stays finite at c = 0.
  const double gap = p.Delta - p.Omega;
  p.r1 = gap == 0 ? cplx(0) : i * (16 * c * std::pow(s4, 5) * c4 / gap);
  const double denom = 16 * c * s4 * std::pow(c4, 5);
  p.r2 = denom == 0 ? cplx(0, kInf) : i * ((p.Omega - p.Delta) / denom);
  p.degenerate = omega == 0;

  normalize(p.r1, false, p.alpha1, p.beta1);
  normalize(p.r2, true, p.alpha2, p.beta2);
  return p;
}

void rescale(SymbolPair& p, double length) {
  const double f = std::pow(kTwoPi / length, 2);
  p.q1 *= f;
  p.q2 *= f;
  p.ms.mu1 *= f;
  p.ms.mu2 *= f;
  p.ms.sigma1 *= f;
  p.ms.sigma2 *= f;
}

}  // namespace

FrequencyPair frequency_pair(int omega, int n_cells) {
  return {omega, omega > 0 ? omega - n_cells : omega + n_cells};
}

MuSigma compute_mu_sigma(int omega, int n_cells, double c, double length) {
  return compute_symbols(omega, n_cells, c, length).ms;
}

SymbolPair compute_symbols(int omega, int n_cells, double c, double length) {
  check_args(omega, n_cells);
  if (length <= 0) throw InvalidDomain("length must be positive");
  SymbolPair p;
  if (omega >= 0) {
    p = symbols_nonnegative(omega, n_cells, c);
  } else {
    // Q is real, so the omega < 0 data are complex conjugates of the -omega data.
    p = symbols_nonnegative(-omega, n_cells, c);
    p.omega = omega;
    p.nu = frequency_pair(omega, n_cells).nu;
    p.ms = {std::conj(p.ms.mu1), std::conj(p.ms.mu2), std::conj(p.ms.sigma1), std::conj(p.ms.sigma2)};
    p.r1 = -std::conj(p.r1);
    p.r2 = std::isinf(std::abs(p.r2)) ? p.r2 : -std::conj(p.r2);
    p.alpha1 = std::conj(p.alpha1);
    p.beta1 = std::conj(p.beta1);
    p.alpha2 = std::conj(p.alpha2);
    p.beta2 = std::conj(p.beta2);
  }
  rescale(p, length);
  return p;
}

SymbolPair symbol_eigenproblem_numeric(int omega, int n_cells, double c, double length) {
  check_args(omega, n_cells);
  const double h = length / n_cells;
  const double k = kTwoPi * omega / length;
  const NodalBlockTriple blocks = bfd_blocks_interior(c, h);
  const cplx i(0, 1);
  const Eigen::Matrix2cd symbol = blocks.left.cast<cplx>() * std::exp(-i * k * h) + blocks.self.cast<cplx>() +
                                  blocks.right.cast<cplx>() * std::exp(i * k * h);
  Eigen::ComplexEigenSolver<Eigen::Matrix2cd> eig(symbol);

  int first = eig.eigenvalues()(0).real() >= eig.eigenvalues()(1).real() ? 0 : 1;
  SymbolPair p;
  p.omega = omega;
  p.nu = frequency_pair(omega, n_cells).nu;
  p.degenerate = omega == 0;
  // Imaginary parts are dropped; tests compare them separately through the
  // eigenvalues of the dense operator.
  p.q1 = eig.eigenvalues()(first).real();
  p.q2 = eig.eigenvalues()(1 - first).real();

  // Node values (V0, V1) times exp(i k x_j) split into alpha, beta using
  // exp(i nu x) = -/+ i sgn exp(i omega x) at the left/right node.
  const double sgn = omega >= 0 ? 1.0 : -1.0;
  auto split = [&](int col, cplx& alpha, cplx& beta, cplx& r) {
    const cplx left = eig.eigenvectors()(0, col) * std::exp(i * k * h / 4.0);
    const cplx right = eig.eigenvectors()(1, col) * std::exp(-i * k * h / 4.0);
    alpha = (left + right) / 2.0;
    beta = i * sgn * (left - right) / 2.0;
    const double norm = std::sqrt(std::norm(alpha) + std::norm(beta));
    alpha /= norm;
    beta /= norm;
    r = std::abs(alpha) < 1e-300 ? cplx(0, kInf) : i * beta / alpha;
  };
  split(first, p.alpha1, p.beta1, p.r1);
  split(1 - first, p.alpha2, p.beta2, p.r2);
  return p;
}

std::vector<double> symbol_spectrum(int n_cells, double c, double length) {
  std::vector<double> out;
  out.reserve(2 * static_cast<std::size_t>(n_cells));
  for (int w = -n_cells / 2 + 1; w <= n_cells / 2; ++w) {
    const SymbolPair p = compute_symbols(w, n_cells, c, length);
    out.push_back(p.q1);
    out.push_back(p.q2);
  }
  return out;
}

Eigen::VectorXcd evolve_single_mode(int omega, int n_cells, double c, double t, double length) {
  check_args(omega, n_cells);
  const BlockGrid1D grid(n_cells, length, true);
  const double h = grid.h();
  const double k = kTwoPi * omega / length;
  const double knu = kTwoPi * frequency_pair(omega, n_cells).nu / length;
  const double decay = std::exp(-k * k * t);
  const double smooth = decay * (1 + (4 + 13 * c) * std::pow(k, 6) * std::pow(h, 4) * t / (2880 * (2 - c)));
  const double rough = c * decay * std::pow(std::abs(k * h), 5) / (1024 * (2 - c));
  const double norm = 1 / std::sqrt(kTwoPi);
  const cplx i(0, 1);

  Eigen::VectorXcd out(grid.node_count());
  for (std::size_t n = 0; n < grid.node_count(); ++n) {
    const double x = grid.node(n);
    out(static_cast<Eigen::Index>(n)) = norm * (smooth * std::exp(i * k * x) + rough * std::exp(i * knu * x));
  }
  return out;
}

double q1_small_h(int omega, int n_cells, double c, double length) {
  const double h = length / n_cells;
  const double k = kTwoPi * omega / length;
  return -k * k + (4 + 13 * c) * std::pow(k, 6) * std::pow(h, 4) / (2880 * (2 - c)) -
         (4 + 38 * c + c * c) * std::pow(k, 8) * std::pow(h, 6) / (64512 * (2 - c) * (2 - c));
}

double q2_small_h(int omega, int n_cells, double c, double length) {
  const double h = length / n_cells;
  const double k = kTwoPi * omega / length;
  return -32 * (2 - c) / (3 * h * h) + (5 - 6 * c) * k * k / 3 - (1 - 3 * c) * std::pow(k, 4) * h * h / 18;
}

}  // namespace eisbfd
