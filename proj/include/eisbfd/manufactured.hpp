#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "eisbfd/spatial_operator.hpp"

namespace eisbfd {

using Point = std::array<double, 3>;
using ScalarField = std::function<double(const Point&, double)>;

/// A manufactured problem u_t = Laplacian(u) + F with every datum needed to
/// run it and to check it.
struct TestCase {
  std::string name;
  std::string description;
  int dim = 1;
  BoundaryMode mode = BoundaryMode::dirichlet;
  double length = 1.0;
  double t_final = 1.0;
  std::vector<int> resolutions;

  ScalarField u;
  ScalarField u_t;
  ScalarField laplacian;
  ScalarField forcing;  ///< u_t - Laplacian(u); empty means zero
  /// Face traces for Dirichlet cases; empty for periodic ones.
  std::function<BoundaryData()> boundary;
};

/// Derivatives D_0..D_4 of exp(cos(p)) with respect to p.
std::array<double, 5> expcos_jet(double p);

/// u = exp(cos(k (x_1 + ... + x_d - t))) on (0, L)^d.
TestCase make_expcos_case(std::string name, int dim, BoundaryMode mode, double wavenumber, double length,
                          double t_final, std::vector<int> resolutions);

/// u = exp(-k^2 t) sin(k x) with k = 2 pi m / L; no forcing, periodic.
TestCase make_mode_case(std::string name, int mode_index, double length, double t_final,
                        std::vector<int> resolutions);

/// u = value everywhere; no forcing.
TestCase make_constant_case(std::string name, int dim, BoundaryMode mode, double value, double length,
                            double t_final, std::vector<int> resolutions);

/// Time-independent 1D polynomial u(x) = sum a_k x^k with F = -u'' so that
/// u is a steady state of the Dirichlet problem.
TestCase make_steady_polynomial_case(std::string name, std::vector<double> coefficients, double length,
                                     std::vector<int> resolutions);

/// Samples a scalar field at every node of the grid.
std::vector<double> sample(const BlockGrid& grid, const ScalarField& f, double t);

}  // namespace eisbfd
