#include "eisbfd/spatial_operator.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "eisbfd/error.hpp"
#include "eisbfd/parallel.hpp"

namespace eisbfd {

namespace {

// Weights of the row for the left node of a cell (offsets -2..3) and the
// right node (offsets -3..2), in units of 1/(12 (h/2)^2).
std::array<double, 6> left_node_weights(double c) {
  return {-1 + c, 16 - 5 * c, -30 + 10 * c, 16 - 10 * c, -1 + 5 * c, -c};
}
std::array<double, 6> right_node_weights(double c) {
  return {-c, -1 + 5 * c, 16 - 10 * c, -30 + 10 * c, 16 - 5 * c, -1 + c};
}

// Closures for the first cell after eliminating the ghost nodes; the last
// cell is the mirror image.
std::array<double, 4> first_row_weights(double c) {
  return {-46 + 15 * c, 17 - 11 * c, -1 + 5 * c, -c};
}
std::array<double, 4> second_row_weights(double c) {
  return {17 - 15 * c, -30 + 11 * c, 16 - 5 * c, -1 + c};
}

// Largest eigenvalue modulus of the 2x2 interior symbol at cell phase theta,
// in units of 1/(3 h^2).
double symbol_modulus(double c, double theta) {
  using cd = std::complex<double>;
  const auto left = left_node_weights(c);
  const auto right = right_node_weights(c);
  cd m[2][2] = {};
  auto add = [&](int row, int target, double w) {
    const int cell = target >= 0 ? target / 2 : -((1 - target) / 2);
    m[row][target - 2 * cell] += w * std::polar(1.0, theta * cell);
  };
  for (int e = 0; e < 6; ++e) {
    add(0, e - 2, left[e]);
    add(1, e - 2, right[e]);
  }
  const cd half_trace = 0.5 * (m[0][0] + m[1][1]);
  const cd root = std::sqrt(half_trace * half_trace - (m[0][0] * m[1][1] - m[0][1] * m[1][0]));
  return std::max(std::abs(half_trace + root), std::abs(half_trace - root));
}

// max over theta of symbol_modulus. The rough mode at theta = 0 gives
// 32 (2 - c) / 3; for c above about 0.84 the maximum moves inside (0, pi).
double symbol_radius(double c) {
  constexpr int kSamples = 512;
  const double pi = std::numbers::pi;
  double best = 32 * (2 - c) / 3;
  int arg = 0;
  for (int k = 0; k <= kSamples; ++k) {
    const double value = symbol_modulus(c, pi * k / kSamples);
    if (value > best) {
      best = value;
      arg = k;
    }
  }
  if (arg == 0) return best;
  // Golden-section refinement on the bracketing samples.
  double a = pi * std::max(arg - 1, 0) / kSamples, b = pi * std::min(arg + 1, kSamples) / kSamples;
  const double g = 0.5 * (std::sqrt(5.0) - 1);
  for (int it = 0; it < 60; ++it) {
    const double x1 = b - g * (b - a), x2 = a + g * (b - a);
    if (symbol_modulus(c, x1) > symbol_modulus(c, x2)) {
      b = x2;
    } else {
      a = x1;
    }
  }
  return std::max(best, symbol_modulus(c, 0.5 * (a + b)));
}

// Coefficients of g, (h/4)^2 u_nn and (h/4)^4 u_nnnn in the two rows next to a face.
std::array<double, 3> first_row_lift(double c) {
  return {30 - 8 * c, 7 + 4 * c, (-65 + 76 * c) / 12};
}
std::array<double, 3> second_row_lift(double c) {
  return {-2 + 8 * c, -1 - 4 * c, (-1 - 76 * c) / 12};
}

double call_or_zero(const FaceTraces::Fn& fn, double s, double t) { return fn ? fn(s, t) : 0.0; }

}  // namespace

SpatialOperator::SpatialOperator(BlockGrid grid, double c, BoundaryMode mode,
                                 std::optional<BoundaryData> data, bool allow_unstable)
    : grid_(std::move(grid)), c_(c), mode_(mode), data_(std::move(data)), radius_(symbol_radius(c)) {
  if (!allow_unstable && !(std::abs(c) <= 1.0)) {
    throw InvalidDomain("stencil parameter c must satisfy |c| <= 1, got " + std::to_string(c));
  }
  if ((mode == BoundaryMode::periodic) != grid_.periodic()) {
    throw ConfigurationError("boundary mode does not match the grid's periodicity");
  }
  if (mode == BoundaryMode::dirichlet && grid_.dim() == 3) {
    throw UnsupportedFeature("Dirichlet closures are implemented in one and two dimensions only");
  }

  const std::size_t m = grid_.points_per_axis();
  const double scale = 1.0 / (3.0 * grid_.h() * grid_.h());
  rows_.resize(m);
  auto wrap = [m](long k) { return static_cast<std::size_t>((k % static_cast<long>(m) + static_cast<long>(m)) % static_cast<long>(m)); };

  const auto left = left_node_weights(c);
  const auto right = right_node_weights(c);
  for (std::size_t r = 0; r < m; ++r) {
    Row& row = rows_[r];
    const bool left_node = r % 2 == 0;
    const long first = static_cast<long>(r) - (left_node ? 2 : 3);
    const auto& w = left_node ? left : right;
    row.count = 6;
    for (int e = 0; e < 6; ++e) row.entries[e] = {wrap(first + e), scale * w[e]};
  }
  if (mode == BoundaryMode::dirichlet) {
    const auto first = first_row_weights(c);
    const auto second = second_row_weights(c);
    rows_[0].count = rows_[1].count = rows_[m - 2].count = rows_[m - 1].count = 4;
    for (int e = 0; e < 4; ++e) {
      rows_[0].entries[e] = {static_cast<std::size_t>(e), scale * first[e]};
      rows_[1].entries[e] = {static_cast<std::size_t>(e), scale * second[e]};
      rows_[m - 1].entries[e] = {m - 1 - e, scale * first[e]};
      rows_[m - 2].entries[e] = {m - 1 - e, scale * second[e]};
    }
    // Interior rows sum to zero exactly; the closure rows do not.
    rows_[0].sum = rows_[m - 1].sum = scale * (first[0] + first[1] + first[2] + first[3]);
    rows_[1].sum = rows_[m - 2].sum = scale * (second[0] + second[1] + second[2] + second[3]);
  }
}

void SpatialOperator::require_size(std::size_t n, const char* what) const {
  if (n != size()) {
    throw DimensionError(std::string(what) + " has " + std::to_string(n) + " entries, grid has " +
                         std::to_string(size()) + " nodes");
  }
}

void SpatialOperator::sweep_axis(int axis, const double* u, double* out) const {
  const std::size_t m = grid_.points_per_axis();
  const std::size_t inner = grid_.stride(axis);
  const std::size_t outer = size() / (m * inner);
  const int workers = worker_count();
  // Differences against the row's own node keep the O(1/h^2) weights from
  // amplifying the rounding of u itself.

  if (inner == 1) {
    // Lines are contiguous: one pass per line.
    const long lines = static_cast<long>(outer);
#pragma omp parallel for schedule(static) if (workers > 1 && lines * m > 4096) num_threads(workers)
    for (long line = 0; line < lines; ++line) {
      const double* ul = u + static_cast<std::size_t>(line) * m;
      double* dl = out + static_cast<std::size_t>(line) * m;
      auto generic = [&](std::size_t r) {
        const Row& row = rows_[r];
        const double self = ul[r];
        double acc = row.sum * self;
        for (int e = 0; e < row.count; ++e) acc += row.entries[e].weight * (ul[row.entries[e].index] - self);
        dl[r] += acc;
      };
      // Rows 3 .. m-4 never wrap and use the two interior patterns; node 2j
      // reaches 2j-2 .. 2j+3 and node 2j+1 reaches 2j-2 .. 2j+3 as well.
      const auto& wl = rows_[4].entries;
      const auto& wr = rows_[5].entries;
      const double l0 = wl[0].weight, l1 = wl[1].weight, l3 = wl[3].weight, l4 = wl[4].weight, l5 = wl[5].weight;
      const double r0 = wr[0].weight, r1 = wr[1].weight, r2 = wr[2].weight, r4 = wr[4].weight, r5 = wr[5].weight;
      std::size_t r = 0;
      for (; r < 4 && r < m; ++r) generic(r);
      for (; r + 6 <= m; r += 2) {
        const double* p = ul + r - 2;
        const double a = p[2], b = p[3];
        dl[r] += l0 * (p[0] - a) + l1 * (p[1] - a) + l3 * (b - a) + l4 * (p[4] - a) + l5 * (p[5] - a);
        dl[r + 1] += r0 * (p[0] - b) + r1 * (p[1] - b) + r2 * (a - b) + r4 * (p[4] - b) + r5 * (p[5] - b);
      }
      for (; r < m; ++r) generic(r);
    }
    return;
  }

  const long total = static_cast<long>(outer * m);
#pragma omp parallel for schedule(static) if (workers > 1 && total * inner > 4096) num_threads(workers)
  for (long job = 0; job < total; ++job) {
    const std::size_t o = static_cast<std::size_t>(job) / m;
    const std::size_t r = static_cast<std::size_t>(job) % m;
    const Row& row = rows_[r];
    const std::size_t base = o * m * inner;
    double* dst = out + base + r * inner;
    const double* self = u + base + r * inner;
    for (int e = 0; e < row.count; ++e) {
      const double* src = u + base + row.entries[e].index * inner;
      const double w = row.entries[e].weight;
      for (std::size_t i = 0; i < inner; ++i) dst[i] += w * (src[i] - self[i]);
    }
    if (row.sum != 0.0) {
      for (std::size_t i = 0; i < inner; ++i) dst[i] += row.sum * self[i];
    }
  }
}

void SpatialOperator::apply_homogeneous(std::span<const double> u, std::span<double> out) const {
  require_size(u.size(), "input");
  require_size(out.size(), "output");
  std::fill(out.begin(), out.end(), 0.0);
  for (int axis = 0; axis < grid_.dim(); ++axis) sweep_axis(axis, u.data(), out.data());
}

FaceValues SpatialOperator::face_values(int face, double s, double t) const {
  if (!data_) throw ConfigurationError("Dirichlet operator has no boundary data");
  const BoundaryData& data = *data_;
  const FaceTraces& tr = data.faces.at(static_cast<std::size_t>(face));
  if (!tr.g || !tr.f || !tr.f_t || !tr.f_nn) {
    throw ConfigurationError("face " + std::to_string(face) + " is missing g, F, F_t or F_nn");
  }
  const bool two_d = grid_.dim() == 2;
  if (two_d && (!tr.f_ss || !tr.u_ss || !tr.u_tss || !tr.u_ssss)) {
    throw ConfigurationError("2D face " + std::to_string(face) + " is missing tangential traces");
  }

  double g_t = 0.0;
  double g_tt = 0.0;
  if (tr.g_t && tr.g_tt) {
    g_t = tr.g_t(s, t);
    g_tt = tr.g_tt(s, t);
  } else if (data.difference_time_derivatives) {
    const double d = data.difference_step;
    std::array<double, 6> g{};
    for (int k = 0; k < 6; ++k) g[k] = tr.g(s, t + k * d);
    g_t = tr.g_t ? tr.g_t(s, t)
                 : (-25 * g[0] + 48 * g[1] - 36 * g[2] + 16 * g[3] - 3 * g[4]) / (12 * d);
    g_tt = tr.g_tt ? tr.g_tt(s, t)
                   : (45 * g[0] - 154 * g[1] + 214 * g[2] - 156 * g[3] + 61 * g[4] - 10 * g[5]) /
                         (12 * d * d);
  } else {
    throw ConfigurationError("face " + std::to_string(face) + " is missing g_t or g_tt");
  }

  const double f = tr.f(s, t);
  const double u_ss = call_or_zero(tr.u_ss, s, t);
  const double u_tss = call_or_zero(tr.u_tss, s, t);
  const double u_ssss = call_or_zero(tr.u_ssss, s, t);
  const double f_ss = call_or_zero(tr.f_ss, s, t);
  // u_nn and u_nnnn follow from the PDE restricted to the face.
  const double u_nn = g_t - u_ss - f;
  const double u_nnnn = g_tt - 2 * u_tss - tr.f_t(s, t) + u_ssss + f_ss - tr.f_nn(s, t);
  return {tr.g(s, t), u_nn, u_nnnn};
}

void SpatialOperator::lift(double t, std::span<double> out) const {
  require_size(out.size(), "output");
  std::fill(out.begin(), out.end(), 0.0);
  if (mode_ == BoundaryMode::periodic) return;
  if (!data_) throw ConfigurationError("Dirichlet operator has no boundary data");

  const std::size_t m = grid_.points_per_axis();
  const double h = grid_.h();
  const double scale = 1.0 / (3.0 * h * h);
  const double q2 = (h / 4) * (h / 4);
  const double q4 = q2 * q2;
  const auto first = first_row_lift(c_);
  const auto second = second_row_lift(c_);
  const auto nodes = grid_.axis().nodes();

  for (int axis = 0; axis < grid_.dim(); ++axis) {
    const std::size_t stride = grid_.stride(axis);
    // In 2D the lines along one axis are labelled by the node on the other axis.
    const std::size_t lines = grid_.dim() == 1 ? 1 : m;
    for (std::size_t line = 0; line < lines; ++line) {
      const double s = grid_.dim() == 1 ? 0.0 : nodes[line];
      const std::size_t base = grid_.dim() == 1 ? 0 : (axis == 0 ? line * m : line);
      for (int side = 0; side < 2; ++side) {
        const FaceValues fv = face_values(2 * axis + side, s, t);
        const double a = fv.g;
        const double b = q2 * fv.u_nn;
        const double d = q4 * fv.u_nnnn;
        const double outer_row = scale * (first[0] * a + first[1] * b + first[2] * d);
        const double inner_row = scale * (second[0] * a + second[1] * b + second[2] * d);
        const std::size_t r0 = side == 0 ? 0 : m - 1;
        const std::size_t r1 = side == 0 ? 1 : m - 2;
        out[base + r0 * stride] += outer_row;
        out[base + r1 * stride] += inner_row;
      }
    }
  }
}

void SpatialOperator::apply(std::span<const double> u, double t, std::span<double> out) const {
  apply_homogeneous(u, out);
  if (mode_ == BoundaryMode::periodic) return;
  std::vector<double> b(size());
  lift(t, b);
  for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
}

Field SpatialOperator::apply(const Field& u) const {
  Field result{std::vector<double>(size()), u.time};
  apply(u.values, u.time, result.values);
  return result;
}

double SpatialOperator::spectral_radius_estimate() const noexcept {
  const double h = grid_.h();
  return grid_.dim() * radius_ / (3.0 * h * h);
}

Field apply_periodic_1d(const SpatialOperator& op, const Field& u) {
  if (op.grid().dim() != 1 || op.mode() != BoundaryMode::periodic) {
    throw ConfigurationError("apply_periodic_1d needs a periodic 1D operator");
  }
  return op.apply(u);
}

Field apply_dirichlet_1d(const SpatialOperator& op, const Field& u, double t) {
  if (op.grid().dim() != 1 || op.mode() != BoundaryMode::dirichlet) {
    throw ConfigurationError("apply_dirichlet_1d needs a Dirichlet 1D operator");
  }
  if (!op.has_boundary_data()) throw ConfigurationError("Dirichlet operator has no boundary data");
  return op.apply(Field{u.values, t});
}

Field apply_2d(const SpatialOperator& op, const Field& u, double t) {
  if (op.grid().dim() != 2) throw ConfigurationError("apply_2d needs a 2D operator");
  return op.apply(Field{u.values, t});
}

Field apply_3d_periodic(const SpatialOperator& op, const Field& u) {
  if (op.grid().dim() != 3) throw ConfigurationError("apply_3d_periodic needs a 3D operator");
  if (op.mode() != BoundaryMode::periodic) {
    throw UnsupportedFeature("3D operators support periodic boundaries only");
  }
  return op.apply(u);
}

DenseOperator assemble_dense(const SpatialOperator& op, double t, std::size_t cap) {
  const std::size_t n = op.size();
  if (n > cap) {
    throw InvalidSize("dense assembly of " + std::to_string(n) + " rows exceeds the cap of " +
                      std::to_string(cap));
  }
  DenseOperator dense{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)),
                      Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n))};
  std::vector<double> unit(n, 0.0);
  std::vector<double> column(n);
  for (std::size_t j = 0; j < n; ++j) {
    unit[j] = 1.0;
    op.apply_homogeneous(unit, column);
    unit[j] = 0.0;
    for (std::size_t i = 0; i < n; ++i) dense.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = column[i];
  }
  if (op.mode() == BoundaryMode::dirichlet) {
    std::vector<double> b(n);
    op.lift(t, b);
    for (std::size_t i = 0; i < n; ++i) dense.lift(static_cast<Eigen::Index>(i)) = b[i];
  }
  return dense;
}

}  // namespace eisbfd
