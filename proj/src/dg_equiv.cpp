#include "eisbfd/dg_equiv.hpp"

#include <algorithm>
#include <array>
#include <sstream>

namespace eisbfd {

namespace {

// Linear functional over (u_{j-5/4}, u_{j-3/4}, u_{j-1/4}, u_{j+1/4}, u_{j+3/4}, u_{j+5/4}).
using LinearForm = std::array<double, 6>;

LinearForm operator+(LinearForm a, const LinearForm& b) {
  for (int i = 0; i < 6; ++i) a[i] += b[i];
  return a;
}
LinearForm operator-(LinearForm a, const LinearForm& b) {
  for (int i = 0; i < 6; ++i) a[i] -= b[i];
  return a;
}
LinearForm operator*(double s, LinearForm a) {
  for (double& v : a) v *= s;
  return a;
}

LinearForm unit(int i) {
  LinearForm e{};
  e[i] = 1.0;
  return e;
}

// Hat basis on a cell in the local coordinate xi = (x - x_j)/h in [-1/2, 1/2]:
// phi_left = 1/2 - 2 xi, phi_right = 1/2 + 2 xi.
double phi(int which, double xi) { return which == 0 ? 0.5 - 2 * xi : 0.5 + 2 * xi; }
double dphi(int which, double h) { return which == 0 ? -2.0 / h : 2.0 / h; }

// Traces of the piecewise linear function on cell k (0 = left neighbour,
// 1 = own cell, 2 = right neighbour).
LinearForm value_at(int cell, double xi) {
  return phi(0, xi) * unit(2 * cell) + phi(1, xi) * unit(2 * cell + 1);
}
LinearForm slope(int cell, double h) {
  return dphi(0, h) * unit(2 * cell) + dphi(1, h) * unit(2 * cell + 1);
}

// Simpson's rule on the cell; exact for the polynomial integrands that occur.
template <class F>
double cell_integral(F&& f, double h) {
  return h / 6 * (f(-0.5) + 4 * f(0.0) + f(0.5));
}

struct FaceTerms {
  LinearForm u_minus, u_plus, ux_minus, ux_plus;
};

// Assembles rows (v = phi_left, v = phi_right) of the right-hand side of the
// weak form. `left_boundary` drops the neighbour to the left (its traces are
// zero) and uses the interior-side derivative as the flux there.
Eigen::Matrix<double, 2, 6> weak_form_rows(const PenaltyCoefficients& p, double h,
                                           bool left_boundary) {
  const FaceTerms right{value_at(1, 0.5), value_at(2, -0.5), slope(1, h), slope(2, h)};
  const FaceTerms left{left_boundary ? LinearForm{} : value_at(0, 0.5), value_at(1, -0.5),
                       left_boundary ? LinearForm{} : slope(0, h), slope(1, h)};

  Eigen::Matrix<double, 2, 6> rows;
  for (int test = 0; test < 2; ++test) {
    const double v_right = phi(test, 0.5);
    const double v_left = phi(test, -0.5);
    const double vx = dphi(test, h);

    // -int u_x v_x
    LinearForm r{};
    const LinearForm ux = slope(1, h);
    const double weight = cell_integral([&](double) { return vx; }, h);
    r = r - weight * ux;

    const LinearForm flux_right = p.alpha * right.ux_minus + (1 - p.alpha) * right.ux_plus;
    const LinearForm flux_left = p.beta * left.ux_minus + (1 - p.beta) * left.ux_plus;
    r = r + v_right * flux_right;
    r = r - v_left * flux_left;

    const LinearForm jump_r = right.u_plus - right.u_minus;
    const LinearForm jump_rx = right.ux_plus - right.ux_minus;
    const LinearForm jump_l = left.u_plus - left.u_minus;
    const LinearForm jump_lx = left.ux_plus - left.ux_minus;

    r = r + v_right * ((p.C1 / h) * jump_r + p.C2 * jump_rx);
    r = r - v_left * ((p.D1 / h) * jump_l + p.D2 * jump_lx);
    r = r + vx * (p.E1 * jump_r + (h * p.E2) * jump_rx);
    r = r - vx * (p.F1 * jump_l + (h * p.F2) * jump_lx);

    for (int i = 0; i < 6; ++i) rows(test, i) = r[i];
  }
  return rows;
}

}  // namespace

NodalBlockTriple bfd_blocks_interior(double c, double h) {
  const double s = 1.0 / (3.0 * h * h);
  NodalBlockTriple t;
  t.left << -1 + c, 16 - 5 * c, -c, -1 + 5 * c;
  t.self << -30 + 10 * c, 16 - 10 * c, 16 - 10 * c, -30 + 10 * c;
  t.right << -1 + 5 * c, -c, 16 - 5 * c, -1 + c;
  t.left *= s;
  t.self *= s;
  t.right *= s;
  return t;
}

PenaltyCoefficients interior_penalties(double c, double alpha, double beta) {
  PenaltyCoefficients p;
  p.C1 = 7.0 / 3.0;
  p.C2 = alpha - 0.5;
  p.D1 = 7.0 / 3.0;
  p.D2 = beta - 0.5;
  p.E1 = -(8 * c + 5) / 18;
  p.E2 = -(c + 1) / 18;
  p.F1 = (8 * c + 5) / 18;
  p.F2 = -(c + 1) / 18;
  p.alpha = alpha;
  p.beta = beta;
  return p;
}

PenaltyCoefficients baumann_oden_penalties() {
  PenaltyCoefficients p;
  p.E1 = 0.5;
  p.F1 = -0.5;
  return p;
}

Eigen::Matrix2d local_mass_matrix(double h) {
  Eigen::Matrix2d m;
  m << 7, -1, -1, 7;
  return m * (h / 12.0);
}

Eigen::Matrix2d local_mass_matrix_inverse(double h) {
  Eigen::Matrix2d m;
  m << 7, 1, 1, 7;
  return m / (4.0 * h);
}

NodalBlockTriple dg_blocks_from_weak_form(const PenaltyCoefficients& coeffs, double h) {
  const Eigen::Matrix<double, 2, 6> strong = local_mass_matrix_inverse(h) * weak_form_rows(coeffs, h, false);
  return {strong.block<2, 2>(0, 0), strong.block<2, 2>(0, 2), strong.block<2, 2>(0, 4)};
}

BoundaryCellBlocks dg_blocks_boundary_cell(double c, double h) {
  const double s = 1.0 / (3.0 * h * h);
  BoundaryCellBlocks b;
  b.self << -46 + 15 * c, 17 - 11 * c, 17 - 15 * c, -30 + 11 * c;
  b.right << -1 + 5 * c, -c, 16 - 5 * c, -1 + c;
  b.self *= s;
  b.right *= s;
  b.penalties.C1 = 7.0 / 3.0;
  b.penalties.C2 = 0.5;
  b.penalties.D1 = 14.0 / 3.0;
  b.penalties.D2 = 0.0;
  b.penalties.E1 = -(8 * c + 5) / 18;
  b.penalties.E2 = -(c + 1) / 18;
  b.penalties.F1 = (8 * c + 5) / 9;
  b.penalties.F2 = 0.0;
  b.penalties.alpha = 1.0;
  b.penalties.beta = 0.0;
  return b;
}

BoundaryCellBlocks dg_boundary_blocks_from_weak_form(const PenaltyCoefficients& coeffs, double h) {
  const Eigen::Matrix<double, 2, 6> strong = local_mass_matrix_inverse(h) * weak_form_rows(coeffs, h, true);
  return {strong.block<2, 2>(0, 2), strong.block<2, 2>(0, 4), coeffs};
}

std::vector<EquivalenceCheck> run_equivalence_checks(const std::vector<double>& c_values,
                                                     const std::vector<std::pair<double, double>>& flux_weights,
                                                     double h, double tol) {
  std::vector<EquivalenceCheck> checks;
  auto diff = [](const NodalBlockTriple& a, const NodalBlockTriple& b) {
    return std::max({(a.left - b.left).cwiseAbs().maxCoeff(), (a.self - b.self).cwiseAbs().maxCoeff(),
                     (a.right - b.right).cwiseAbs().maxCoeff()});
  };
  // Entrywise tolerance relative to the 1/h^2 scale of the blocks.
  const double scale = 1.0 / (h * h);

  {
    NodalBlockTriple expected;
    expected.left << 7, -1, 1, -7;
    expected.self << -24, 24, 24, -24;
    expected.right << -7, 1, -1, 7;
    expected.left /= 4 * h * h;
    expected.self /= 4 * h * h;
    expected.right /= 4 * h * h;
    const double d = diff(dg_blocks_from_weak_form(baumann_oden_penalties(), h), expected);
    checks.push_back({"baumann-oden central flux", d, d <= tol * scale});
  }
  for (double c : c_values) {
    for (const auto& [alpha, beta] : flux_weights) {
      const double d = diff(dg_blocks_from_weak_form(interior_penalties(c, alpha, beta), h),
                            bfd_blocks_interior(c, h));
      std::ostringstream label;
      label << "interior c=" << c << " alpha=" << alpha << " beta=" << beta;
      checks.push_back({label.str(), d, d <= tol * scale});
    }
    const BoundaryCellBlocks expected = dg_blocks_boundary_cell(c, h);
    const BoundaryCellBlocks weak = dg_boundary_blocks_from_weak_form(expected.penalties, h);
    const double d = std::max((weak.self - expected.self).cwiseAbs().maxCoeff(),
                              (weak.right - expected.right).cwiseAbs().maxCoeff());
    std::ostringstream label;
    label << "first cell c=" << c;
    checks.push_back({label.str(), d, d <= tol * scale});
  }
  return checks;
}

}  // namespace eisbfd
