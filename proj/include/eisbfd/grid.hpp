#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace eisbfd {

/// Exterior nodes used by the Dirichlet closures. `left` holds the
/// coordinates at -h/4 and -3h/4, `right` those at L+h/4 and L+3h/4.
struct GhostLayer {
  std::array<double, 2> left;
  std::array<double, 2> right;
};

/// Uniform block grid on (0, L): N cells of width h, two nodes per cell at
/// the cell centre -/+ h/4. Nodes are stored cell by cell, left node first.
class BlockGrid1D {
 public:
  BlockGrid1D(int n_cells, double length, bool periodic);

  int n_cells() const noexcept { return n_cells_; }
  double length() const noexcept { return length_; }
  double h() const noexcept { return length_ / n_cells_; }
  bool periodic() const noexcept { return periodic_; }

  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::span<const double> nodes() const noexcept { return nodes_; }
  double node(std::size_t k) const { return nodes_[k]; }
  double cell_center(int cell) const noexcept { return h() * (cell + 0.5); }

  /// Present only for Dirichlet grids.
  const std::optional<GhostLayer>& ghosts() const noexcept { return ghosts_; }

  friend bool operator==(const BlockGrid1D&, const BlockGrid1D&) = default;

 private:
  int n_cells_;
  double length_;
  bool periodic_;
  std::vector<double> nodes_;
  std::optional<GhostLayer> ghosts_;
};

/// Tensor product of identical 1D block grids in 1, 2 or 3 dimensions.
/// Flat index runs x fastest, then y, then z; along each axis the order is
/// that of BlockGrid1D.
class BlockGrid {
 public:
  BlockGrid(int dim, BlockGrid1D axis);
  explicit BlockGrid(BlockGrid1D axis) : BlockGrid(1, std::move(axis)) {}

  int dim() const noexcept { return dim_; }
  const BlockGrid1D& axis() const noexcept { return axis_; }
  int n_cells() const noexcept { return axis_.n_cells(); }
  double h() const noexcept { return axis_.h(); }
  double length() const noexcept { return axis_.length(); }
  bool periodic() const noexcept { return axis_.periodic(); }

  std::size_t points_per_axis() const noexcept { return axis_.node_count(); }
  std::size_t node_count() const noexcept;
  /// Distance in the flat index between neighbours along `axis`.
  std::size_t stride(int axis) const noexcept;
  std::size_t index(std::size_t ix, std::size_t iy = 0, std::size_t iz = 0) const noexcept;
  std::array<double, 3> coordinates(std::size_t flat_index) const noexcept;

  friend bool operator==(const BlockGrid&, const BlockGrid&) = default;

 private:
  int dim_;
  BlockGrid1D axis_;
};

BlockGrid1D build_grid_1d(int n_cells, double length, bool periodic);
BlockGrid build_grid_2d(int n_cells, double length, bool periodic);
BlockGrid build_grid_3d(int n_cells, double length, bool periodic);

}  // namespace eisbfd
