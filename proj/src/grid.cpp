#include "eisbfd/grid.hpp"

#include <string>

#include "eisbfd/error.hpp"

namespace eisbfd {

BlockGrid1D::BlockGrid1D(int n_cells, double length, bool periodic)
    : n_cells_(n_cells), length_(length), periodic_(periodic) {
  // The interior stencil reaches into both neighbouring cells.
  if (n_cells < 3) {
    throw InvalidSize("block grid needs at least 3 cells, got " + std::to_string(n_cells));
  }
  if (!(length > 0.0)) {
    throw InvalidDomain("domain length must be positive, got " + std::to_string(length));
  }
  const double cell = h();
  nodes_.resize(2 * static_cast<std::size_t>(n_cells));
  for (int j = 0; j < n_cells; ++j) {
    const double centre = cell * (j + 0.5);
    nodes_[2 * j] = centre - cell / 4;
    nodes_[2 * j + 1] = centre + cell / 4;
  }
  if (!periodic) {
    ghosts_ = GhostLayer{{-cell / 4, -3 * cell / 4}, {length + cell / 4, length + 3 * cell / 4}};
  }
}

BlockGrid::BlockGrid(int dim, BlockGrid1D axis) : dim_(dim), axis_(std::move(axis)) {
  if (dim < 1 || dim > 3) {
    throw InvalidSize("grid dimension must be 1, 2 or 3, got " + std::to_string(dim));
  }
}

std::size_t BlockGrid::node_count() const noexcept {
  std::size_t count = 1;
  for (int d = 0; d < dim_; ++d) count *= points_per_axis();
  return count;
}

std::size_t BlockGrid::stride(int axis) const noexcept {
  std::size_t s = 1;
  for (int d = 0; d < axis; ++d) s *= points_per_axis();
  return s;
}

std::size_t BlockGrid::index(std::size_t ix, std::size_t iy, std::size_t iz) const noexcept {
  const std::size_t m = points_per_axis();
  return ix + m * (iy + m * iz);
}

std::array<double, 3> BlockGrid::coordinates(std::size_t flat_index) const noexcept {
  const std::size_t m = points_per_axis();
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int d = 0; d < dim_; ++d) {
    x[d] = axis_.node(flat_index % m);
    flat_index /= m;
  }
  return x;
}

BlockGrid1D build_grid_1d(int n_cells, double length, bool periodic) {
  return BlockGrid1D(n_cells, length, periodic);
}

BlockGrid build_grid_2d(int n_cells, double length, bool periodic) {
  return BlockGrid(2, BlockGrid1D(n_cells, length, periodic));
}

BlockGrid build_grid_3d(int n_cells, double length, bool periodic) {
  return BlockGrid(3, BlockGrid1D(n_cells, length, periodic));
}

}  // namespace eisbfd
