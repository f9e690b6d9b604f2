#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "eisbfd/grid.hpp"

namespace eisbfd {

/// The free parameter value that removes the h^4 error term.
inline constexpr double kOptimalC = -4.0 / 13.0;

enum class BoundaryMode { periodic, dirichlet };

/// Time-dependent data on one face of the box. Every callable takes the
/// tangential coordinate along the face (ignored in 1D) and the time.
struct FaceTraces {
  using Fn = std::function<double(double, double)>;

  Fn g;     ///< Dirichlet value
  Fn g_t;   ///< may be left empty when BoundaryData::difference_time_derivatives is set
  Fn g_tt;
  Fn f;     ///< forcing trace
  Fn f_t;
  Fn f_nn;  ///< second normal derivative of the forcing

  // Tangential data, required in 2D only.
  Fn f_ss;
  Fn u_ss;
  Fn u_tss;
  Fn u_ssss;
};

struct BoundaryData {
  /// Faces ordered x-low, x-high, y-low, y-high.
  std::array<FaceTraces, 4> faces;
  /// Fill in missing g_t and g_tt with fourth-order one-sided differences of g.
  bool difference_time_derivatives = false;
  double difference_step = 1e-3;
};

/// Values of the boundary traces that enter the ghost extrapolation.
struct FaceValues {
  double g;
  double u_nn;
  double u_nnnn;
};

/// Grid function at a given time.
struct Field {
  std::vector<double> values;
  double time = 0.0;
};

/// The block finite difference Laplacian Q. Periodic operators are linear;
/// Dirichlet operators are affine, apply(u, t) = Q u + b(t).
class SpatialOperator {
 public:
  SpatialOperator(BlockGrid grid, double c, BoundaryMode mode,
                  std::optional<BoundaryData> data = std::nullopt, bool allow_unstable = false);

  const BlockGrid& grid() const noexcept { return grid_; }
  double c() const noexcept { return c_; }
  BoundaryMode mode() const noexcept { return mode_; }
  bool has_boundary_data() const noexcept { return data_.has_value(); }
  std::size_t size() const noexcept { return grid_.node_count(); }

  /// out = Q u, the homogeneous part.
  void apply_homogeneous(std::span<const double> u, std::span<double> out) const;
  /// out = b(t); identically zero for periodic operators.
  void lift(double t, std::span<double> out) const;
  /// out = Q u + b(t).
  void apply(std::span<const double> u, double t, std::span<double> out) const;
  Field apply(const Field& u) const;

  FaceValues face_values(int face, double s, double t) const;

  /// d times the largest symbol modulus over all wavenumbers. This is
  /// d * 32 (2 - c) / (3 h^2) for c up to about 0.84 and slightly more above.
  double spectral_radius_estimate() const noexcept;

 private:
  struct RowEntry {
    std::size_t index;
    double weight;
  };
  struct Row {
    std::array<RowEntry, 6> entries;
    int count = 0;
    double sum = 0.0;  // row sum of the weights

  };

  void sweep_axis(int axis, const double* u, double* out) const;
  void require_size(std::size_t n, const char* what) const;

  BlockGrid grid_;
  double c_;
  BoundaryMode mode_;
  std::optional<BoundaryData> data_;
  std::vector<Row> rows_;  // one per node along an axis, weights include 1/(3h^2)
  double radius_;          // largest symbol modulus in units of 1/(3h^2)
};

Field apply_periodic_1d(const SpatialOperator& op, const Field& u);
Field apply_dirichlet_1d(const SpatialOperator& op, const Field& u, double t);
Field apply_2d(const SpatialOperator& op, const Field& u, double t);
Field apply_3d_periodic(const SpatialOperator& op, const Field& u);

struct DenseOperator {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd lift;
};

inline constexpr std::size_t kDenseRowCap = 10000;

/// Dense Q and b(t) with apply(u, t) == Q u + b to rounding.
DenseOperator assemble_dense(const SpatialOperator& op, double t,
                             std::size_t cap = kDenseRowCap);

}  // namespace eisbfd
