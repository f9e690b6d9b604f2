#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace eisbfd {

/// Couplings of the two nodes of cell j to cells j-1 (left), j (self) and
/// j+1 (right): d/dt u_j = left u_{j-1} + self u_j + right u_{j+1}.
struct NodalBlockTriple {
  Eigen::Matrix2d left;
  Eigen::Matrix2d self;
  Eigen::Matrix2d right;
};

/// Penalty weights of the generalised weak form. C/E act on the right face
/// of the cell, D/F on the left face; alpha and beta weight the one-sided
/// derivatives in the numerical fluxes at the right and left faces.
struct PenaltyCoefficients {
  double C1 = 0, C2 = 0;
  double D1 = 0, D2 = 0;
  double E1 = 0, E2 = 0;
  double F1 = 0, F2 = 0;
  double alpha = 0.5, beta = 0.5;
};

NodalBlockTriple bfd_blocks_interior(double c, double h);

/// Penalties under which the weak form reproduces the interior BFD rows.
/// alpha and beta are free.
PenaltyCoefficients interior_penalties(double c, double alpha, double beta);

/// Central flux with the Baumann-Oden jump terms only.
PenaltyCoefficients baumann_oden_penalties();

/// Strong nodal update of the p = 1 weak form on a uniform mesh with the
/// hat basis at x_j -/+ h/4, after inverting the local mass matrix.
NodalBlockTriple dg_blocks_from_weak_form(const PenaltyCoefficients& coeffs, double h);

struct BoundaryCellBlocks {
  Eigen::Matrix2d self;
  Eigen::Matrix2d right;
  PenaltyCoefficients penalties;
};

/// First-cell rows of the Dirichlet scheme (homogeneous part) and the
/// penalty set that produces them (alpha = 1, beta = 0).
BoundaryCellBlocks dg_blocks_boundary_cell(double c, double h);

/// Weak form of the first cell: the left face has no neighbour, so its
/// jumps reduce to the interior traces (zero boundary data).
BoundaryCellBlocks dg_boundary_blocks_from_weak_form(const PenaltyCoefficients& coeffs, double h);

/// Hard-coded local mass matrix of the hat basis and its inverse.
Eigen::Matrix2d local_mass_matrix(double h);
Eigen::Matrix2d local_mass_matrix_inverse(double h);

struct EquivalenceCheck {
  std::string label;
  double max_abs_difference;
  bool passed;
};

/// Runs the interior and boundary-cell equivalence comparisons for the
/// given c values and (alpha, beta) pairs.
std::vector<EquivalenceCheck> run_equivalence_checks(const std::vector<double>& c_values,
                                                     const std::vector<std::pair<double, double>>& flux_weights,
                                                     double h, double tol);

}  // namespace eisbfd
