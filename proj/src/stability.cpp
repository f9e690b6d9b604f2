#include "eisbfd/stability.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "eisbfd/error.hpp"

namespace eisbfd {

ThetaMatrix theta_interior(double c, double h) {
  Eigen::Matrix4d m;
  const double a = 8 * c - 19;
  const double b = (71 - 40 * c) / 3;
  const double d = 8 * c - 5;
  const double e = (1 - 8 * c) / 3;
  const double f = (56 * c - 169) / 3;
  const double g = (113 - 40 * c) / 3;
  // clang-format off
  m << a, b, d, e,
       b, f, g, d,
       d, g, f, b,
       e, d, b, a;
  // clang-format on
  m /= 12 * h;
  return {m, m.topLeftCorner<3, 3>(), ThetaKind::interior};
}

ThetaMatrix theta_boundary(double c, double h) {
  Eigen::Matrix4d m;
  const double a = 3 * (8 * c - 19);
  const double b = 71 - 40 * c;
  const double d = (8 * c - 7) / 2;  // printed as -(7 - 8c)/2 above the diagonal
  const double e = (1 - 8 * c) / 2;
  const double f = 56 * c - 169;
  const double g = (113 - 40 * c) / 2;
  const double k = (40 * c - 23) / 2;
  // clang-format off
  m << a, b, d, e,
       b, f, g, k,
       d, g, f, b,
       e, k, b, a;
  // clang-format on
  m /= 36 * h;
  return {m, m.topLeftCorner<3, 3>(), ThetaKind::boundary};
}

std::array<double, 3> sylvester_diagonal(double c) {
  const double p = 2 * c * (8 * c + 49) - 287;
  const double q = 2 * c * (2 * c + 7) - 35;
  return {8 * c - 19, -16.0 / 9.0 * (8 * c - 19) * p,
          16384.0 / 243.0 * std::pow(19 - 8 * c, 4) * (2 * c - 7) * q * p};
}

Inertia inertia_of(std::span<const double> values, double tol) {
  double largest = 0;
  for (double v : values) largest = std::max(largest, std::abs(v));
  Inertia in;
  for (double v : values) {
    if (std::abs(v) <= tol * largest) {
      ++in.zero;
    } else if (v < 0) {
      ++in.negative;
    } else {
      ++in.positive;
    }
  }
  return in;
}

std::vector<double> uniform_samples(int count, double lo, double hi) {
  if (count < 1) throw InvalidSize("need at least one sample");
  if (count == 1) return {lo};
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
  return out;
}

bool CertificationReport::all_passed() const noexcept {
  return std::all_of(rows.begin(), rows.end(), [](const CertificationRow& r) { return r.passed(); });
}

std::vector<double> CertificationReport::failures_in_range() const {
  std::vector<double> out;
  for (const auto& r : rows) {
    if (r.in_proven_range && !r.passed()) out.push_back(r.c);
  }
  return out;
}

CertificationReport certify_interior(std::span<const double> c_samples, double tol) {
  CertificationReport report;
  report.tol = tol;
  // h = 1/12 makes 12h M the integer-coefficient matrix; h = 1/36 likewise for the boundary form.
  constexpr double h_interior = 1.0 / 12.0;
  constexpr double h_boundary = 1.0 / 36.0;
  constexpr double rank_tol = 1e-10;

  for (double c : c_samples) {
    CertificationRow row;
    row.c = c;
    row.in_proven_range = std::abs(c) <= 1.0;

    const ThetaMatrix interior = theta_interior(c, h_interior);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> reduced(interior.reduced, Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> full(interior.M, Eigen::EigenvaluesOnly);
    for (int i = 0; i < 3; ++i) row.reduced_eigenvalues[i] = reduced.eigenvalues()(i);
    row.eigenvalues_ok = row.reduced_eigenvalues[2] <= tol;

    row.diagonal = sylvester_diagonal(c);
    row.diagonal_ok = std::all_of(row.diagonal.begin(), row.diagonal.end(), [](double d) { return d <= 0.0; });

    row.reduced_inertia = inertia_of(row.reduced_eigenvalues, rank_tol);
    row.diagonal_signs = inertia_of(row.diagonal, 0.0);
    row.inertia_ok = row.reduced_inertia == row.diagonal_signs;

    std::array<double, 4> full_values{};
    for (int i = 0; i < 4; ++i) full_values[i] = full.eigenvalues()(i);
    const Inertia full_inertia = inertia_of(full_values, rank_tol);
    row.rank_full = full_inertia.negative + full_inertia.positive;
    row.rank_reduced = row.reduced_inertia.negative + row.reduced_inertia.positive;
    row.null_residual = (interior.M * Eigen::Vector4d::Ones()).cwiseAbs().maxCoeff();
    row.rank_ok = row.rank_full == row.rank_reduced && row.null_residual <= tol;

    const ThetaMatrix boundary = theta_boundary(c, h_boundary);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> bsolve(boundary.M, Eigen::EigenvaluesOnly);
    for (int i = 0; i < 4; ++i) row.boundary_eigenvalues[i] = bsolve.eigenvalues()(i);
    row.boundary_ok = row.boundary_eigenvalues[3] <= tol;

    report.rows.push_back(row);
  }
  return report;
}

EnergyReport semidiscrete_energy_check(const SpatialOperator& op, int trials, double tol, unsigned seed) {
  if (op.mode() != BoundaryMode::periodic) {
    throw UnsupportedFeature("energy check is defined for periodic operators");
  }
  EnergyReport report;
  report.scale = op.spectral_radius_estimate();
  const std::size_t n = op.size();

  std::vector<double> u(n, 1.0);
  std::vector<double> qu(n);
  op.apply_homogeneous(u, qu);
  for (double v : qu) report.constant_form += v;

  std::mt19937 rng(seed);
  std::normal_distribution<double> normal;
  report.max_rayleigh_quotient = -std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < trials; ++trial) {
    double norm2 = 0;
    for (double& v : u) {
      v = normal(rng);
      norm2 += v * v;
    }
    op.apply_homogeneous(u, qu);
    double form = 0;
    for (std::size_t i = 0; i < n; ++i) form += u[i] * qu[i];
    report.max_rayleigh_quotient = std::max(report.max_rayleigh_quotient, form / norm2);
  }

  const DenseOperator dense = assemble_dense(op, 0.0);
  const Eigen::MatrixXd sym = 0.5 * (dense.matrix + dense.matrix.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
  report.max_symmetric_eigenvalue = eig.eigenvalues().maxCoeff();

  const double bound = tol * report.scale;
  report.passed = report.max_symmetric_eigenvalue <= bound && report.max_rayleigh_quotient <= bound &&
                  std::abs(report.constant_form) <= bound * static_cast<double>(n);
  return report;
}

}  // namespace eisbfd
