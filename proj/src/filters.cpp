#include "eisbfd/filters.hpp"

#include <fftw3.h>

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <map>
#include <mutex>
#include <tuple>

#include "eisbfd/error.hpp"

namespace eisbfd {
namespace {

using Projection = Eigen::MatrixXd;

// Maps window samples to the values of their degree-`degree` polynomial part.
// With alt_degree < 0 this is the least-squares projector. Otherwise the
// window is fitted (least squares, exact when the basis is square) by a
// degree-`degree` polynomial plus (-1)^k times a degree-`alt_degree`
// polynomial, and only the first part is kept.
Projection fit_projector(int points, int degree, int alt_degree) {
  const int smooth_cols = degree + 1;
  const int cols = smooth_cols + std::max(alt_degree + 1, 0);
  Eigen::MatrixXd basis(points, cols);
  const double mid = 0.5 * (points - 1);
  for (int i = 0; i < points; ++i) {
    const double x = (i - mid) / std::max(mid, 1.0);
    const double sign = i % 2 == 0 ? 1.0 : -1.0;
    double p = 1;
    for (int k = 0; k < cols; ++k) {
      if (k == smooth_cols) p = 1;
      basis(i, k) = k < smooth_cols ? p : sign * p;
      p *= x;
    }
  }
  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> fit(basis);
  const Eigen::MatrixXd coeffs = fit.pseudoInverse();
  return basis.leftCols(smooth_cols) * coeffs.topRows(smooth_cols);
}

const Projection& cached_projector(int points, int degree, int alt_degree = -1) {
  static std::mutex guard;
  static std::map<std::tuple<int, int, int>, Projection> cache;
  std::lock_guard lock(guard);
  auto key = std::make_tuple(points, degree, alt_degree);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, fit_projector(points, degree, alt_degree)).first;
  return it->second;
}

// Writes rows [first, last) of the fit over u[start, start + points) into out.
void write_fit(std::span<const double> u, std::vector<double>& out, const Projection& proj, std::size_t start,
               int first, int last) {
  const int points = static_cast<int>(proj.rows());
  for (int r = first; r < last; ++r) {
    double acc = 0;
    for (int k = 0; k < points; ++k) acc += proj(r, k) * u[start + static_cast<std::size_t>(k)];
    out[start + static_cast<std::size_t>(r)] = acc;
  }
}

void check_fit(int degree, int oscillation_degree, int points) {
  if (degree < 0 || degree >= points) throw ConfigurationError("fit degree must lie in [0, window size)");
  if (degree + 1 + std::max(oscillation_degree + 1, 0) > points) {
    throw ConfigurationError("fit basis has more functions than the window has nodes");
  }
}

template <typename LineFilter>
Field filter_lines(const BlockGrid& grid, const Field& u, LineFilter&& filter) {
  if (u.values.size() != grid.node_count()) throw DimensionError("field does not match the grid");
  Field out = u;
  const std::size_t m = grid.points_per_axis();
  std::vector<double> line(m);
  for (int axis = 0; axis < grid.dim(); ++axis) {
    const std::size_t stride = grid.stride(axis);
    for (std::size_t start = 0; start < out.values.size(); ++start) {
      if ((start / stride) % m != 0) continue;
      for (std::size_t k = 0; k < m; ++k) line[k] = out.values[start + k * stride];
      const std::vector<double> filtered = filter(std::span<const double>(line));
      for (std::size_t k = 0; k < m; ++k) out.values[start + k * stride] = filtered[k];
    }
  }
  return out;
}

}  // namespace

FilterKind parse_filter_kind(const std::string& name) {
  if (name == "none" || name.empty()) return FilterKind::none;
  if (name == "spectral") return FilterKind::spectral;
  if (name == "interp1") return FilterKind::interp1;
  if (name == "interp2") return FilterKind::interp2;
  if (name == "sg" || name == "savitzky-golay" || name == "savitzky_golay") return FilterKind::savitzky_golay;
  throw ConfigurationError("unknown filter '" + name + "'");
}

std::string filter_name(FilterKind kind) {
  switch (kind) {
    case FilterKind::none: return "none";
    case FilterKind::spectral: return "spectral";
    case FilterKind::interp1: return "interp1";
    case FilterKind::interp2: return "interp2";
    case FilterKind::savitzky_golay: return "sg";
  }
  return "none";
}

std::vector<double> spectral_filter_line(std::span<const double> u) {
  const int n = static_cast<int>(u.size());
  if (n < 2) throw InvalidSize("spectral filter needs at least two samples");
  const int bins = n / 2 + 1;
  // Keep |k| <= N/2 where N = n/2 cells; modes beyond that are the high partners.
  const double cutoff = n / 4.0;

  double* real = fftw_alloc_real(static_cast<std::size_t>(n));
  fftw_complex* spec = fftw_alloc_complex(static_cast<std::size_t>(bins));
  std::vector<double> out(u.begin(), u.end());
  {
    static std::mutex planner;  // the FFTW planner is not thread-safe
    fftw_plan forward, backward;
    {
      std::lock_guard lock(planner);
      forward = fftw_plan_dft_r2c_1d(n, real, spec, FFTW_ESTIMATE);
      backward = fftw_plan_dft_c2r_1d(n, spec, real, FFTW_ESTIMATE);
    }
    std::copy(u.begin(), u.end(), real);
    fftw_execute(forward);
    for (int k = 0; k < bins; ++k) {
      if (k > cutoff) spec[k][0] = spec[k][1] = 0;
    }
    fftw_execute(backward);
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = real[i] / n;
    std::lock_guard lock(planner);
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }
  fftw_free(real);
  fftw_free(spec);
  return out;
}

std::vector<double> interp_filter_first(std::span<const double> u, int degree, int oscillation_degree) {
  const std::size_t n = u.size();
  constexpr std::size_t w = kInterpWindow;
  if (n < w) throw UnsupportedFeature("interpolation filter needs at least 12 nodes");
  check_fit(degree, oscillation_degree, kInterpWindow);
  const Projection& proj = cached_projector(kInterpWindow, degree, oscillation_degree);
  std::vector<double> out(n);
  std::size_t start = 0;
  for (; start + w <= n; start += w) write_fit(u, out, proj, start, 0, kInterpWindow);
  if (start < n) write_fit(u, out, proj, n - w, 0, kInterpWindow);  // later block wins on the overlap
  return out;
}

std::vector<double> interp_filter_second(std::span<const double> u, int degree, int oscillation_degree) {
  const std::size_t n = u.size();
  constexpr std::size_t w = kInterpWindow;
  if (n < w) throw UnsupportedFeature("interpolation filter needs at least 12 nodes");
  check_fit(degree, oscillation_degree, kInterpWindow);
  const Projection& proj = cached_projector(kInterpWindow, degree, oscillation_degree);
  std::vector<double> out(n);
  write_fit(u, out, proj, 0, 0, 6);
  // Pairs start at even offsets 6, 8, ...; each fit window is [p - 5, p + 6].
  std::size_t p = 6;
  for (; p + 8 <= n; p += 2) write_fit(u, out, proj, p - 5, 5, 7);
  write_fit(u, out, proj, n - w, static_cast<int>(p - (n - w)), kInterpWindow);
  return out;
}

std::vector<double> savitzky_golay(std::span<const double> u, int degree, int half_window) {
  const std::size_t n = u.size();
  const int width = 2 * half_window + 1;
  if (half_window < 1 || static_cast<std::size_t>(width) > n) {
    throw UnsupportedFeature("Savitzky-Golay window does not fit in the data");
  }
  if (degree < 0 || degree > 2 * half_window) throw ConfigurationError("Savitzky-Golay degree must not exceed 2m");
  const Projection& proj = cached_projector(width, degree);
  const std::size_t m = static_cast<std::size_t>(half_window);
  std::vector<double> out(n);
  write_fit(u, out, proj, 0, 0, half_window);
  for (std::size_t k = m; k + m < n; ++k) write_fit(u, out, proj, k - m, half_window, half_window + 1);
  write_fit(u, out, proj, n - static_cast<std::size_t>(width), half_window + 1, width);
  return out;
}

Field apply_filter(const BlockGrid& grid, const Field& u, const FilterSpec& spec) {
  switch (spec.kind) {
    case FilterKind::none:
      if (u.values.size() != grid.node_count()) throw DimensionError("field does not match the grid");
      return u;
    case FilterKind::spectral:
      return spectral_filter(grid, u);
    case FilterKind::interp1:
      return filter_lines(grid, u, [&](std::span<const double> l) { return interp_filter_first(l, spec.degree, spec.oscillation_degree); });
    case FilterKind::interp2:
      return filter_lines(grid, u, [&](std::span<const double> l) { return interp_filter_second(l, spec.degree, spec.oscillation_degree); });
    case FilterKind::savitzky_golay:
      return filter_lines(grid, u,
                          [&](std::span<const double> l) { return savitzky_golay(l, spec.degree, spec.half_window); });
  }
  throw ConfigurationError("unknown filter kind");
}

Field spectral_filter(const BlockGrid& grid, const Field& u) {
  if (!grid.periodic()) throw UnsupportedFeature("spectral filtering requires a periodic grid");
  return filter_lines(grid, u, [](std::span<const double> l) { return spectral_filter_line(l); });
}

Field spectral_filter_2d(const BlockGrid& grid, const Field& u) {
  if (grid.dim() != 2) throw DimensionError("expected a two-dimensional grid");
  return spectral_filter(grid, u);
}

}  // namespace eisbfd
