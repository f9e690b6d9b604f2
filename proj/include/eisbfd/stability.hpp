#pragma once

#include <Eigen/Dense>
#include <array>
#include <span>
#include <vector>

#include "eisbfd/spatial_operator.hpp"

namespace eisbfd {

enum class ThetaKind { interior, boundary };

/// Matrix of the interface quadratic form, Theta = x^T M x, with
/// x = the four nodal values of the two cells sharing the interface.
struct ThetaMatrix {
  Eigen::Matrix4d M;
  /// Leading 3x3 block (row/column 4 removed).
  Eigen::Matrix3d reduced;
  ThetaKind kind;
};

ThetaMatrix theta_interior(double c, double h);
ThetaMatrix theta_boundary(double c, double h);

/// Diagonal of the congruence D = S M' S^T in units of 1/(12h).
std::array<double, 3> sylvester_diagonal(double c);

struct Inertia {
  int negative = 0;
  int zero = 0;
  int positive = 0;
  friend bool operator==(const Inertia&, const Inertia&) = default;
};

/// Sign counts of `values`; entries with |v| <= tol * max|v| count as zero.
Inertia inertia_of(std::span<const double> values, double tol);

struct CertificationRow {
  double c = 0;
  bool in_proven_range = true;  ///< |c| <= 1
  std::array<double, 3> reduced_eigenvalues{};  ///< of 12h M', ascending
  std::array<double, 3> diagonal{};             ///< closed-form D entries
  Inertia reduced_inertia;
  Inertia diagonal_signs;
  int rank_full = 0;
  int rank_reduced = 0;
  double null_residual = 0;  ///< |12h M 1|_inf
  std::array<double, 4> boundary_eigenvalues{};  ///< of 36h M_boundary, ascending

  bool eigenvalues_ok = false;
  bool diagonal_ok = false;
  bool inertia_ok = false;
  bool rank_ok = false;
  bool boundary_ok = false;
  bool passed() const noexcept {
    return eigenvalues_ok && diagonal_ok && inertia_ok && rank_ok && boundary_ok;
  }
};

struct CertificationReport {
  std::vector<CertificationRow> rows;
  double tol = 0;
  bool all_passed() const noexcept;
  /// Rows with |c| <= 1 that failed; rows outside the range are informational.
  std::vector<double> failures_in_range() const;
};

std::vector<double> uniform_samples(int count, double lo = -1.0, double hi = 1.0);

/// Eigenvalue, closed-form diagonal, inertia and rank checks for the
/// interior form, plus the eigenvalue check for the boundary form, at every c.
CertificationReport certify_interior(std::span<const double> c_samples, double tol);

struct EnergyReport {
  double max_rayleigh_quotient = 0;     ///< over the random trials, u^T Q u / u^T u
  double max_symmetric_eigenvalue = 0;  ///< of (Q + Q^T)/2, from a dense eigensolve
  double constant_form = 0;             ///< 1^T Q 1
  double scale = 0;                     ///< spectral radius estimate of Q
  bool passed = false;
};

/// Checks u^T (Q + Q^T) u <= tol * scale * |u|^2 for a periodic operator.
EnergyReport semidiscrete_energy_check(const SpatialOperator& op, int trials, double tol = 1e-10,
                                       unsigned seed = 2024);

}  // namespace eisbfd
