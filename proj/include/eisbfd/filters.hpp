#pragma once

#include <span>
#include <string>
#include <vector>

#include "eisbfd/grid.hpp"
#include "eisbfd/spatial_operator.hpp"

namespace eisbfd {

enum class FilterKind { none, spectral, interp1, interp2, savitzky_golay };

struct FilterSpec {
  FilterKind kind = FilterKind::none;
  int degree = 6;       ///< least-squares fit degree
  int half_window = 5;  ///< Savitzky-Golay window is 2 * half_window + 1
  /// Interpolation filters only: degree of the (-1)^k-modulated part fitted
  /// alongside the polynomial and then discarded; negative for a plain fit.
  int oscillation_degree = 2;
};

/// Accepts none, spectral, interp1, interp2, sg / savitzky-golay.
FilterKind parse_filter_kind(const std::string& name);
std::string filter_name(FilterKind kind);

/// Number of nodes in one interpolation-filter fit.
inline constexpr int kInterpWindow = 12;

// Filters on one contiguous line of equispaced samples.

/// Zeroes DFT modes with |k| > n/4 for n samples (n = 2N nodes, cut-off N/2).
std::vector<double> spectral_filter_line(std::span<const double> u);

/// Least-squares fit on consecutive blocks of 12 nodes, each node replaced by
/// the polynomial part of its block's fit. A trailing partial block is replaced by
/// the fit on the last 12 nodes.
std::vector<double> interp_filter_first(std::span<const double> u, int degree = 6, int oscillation_degree = 2);

/// Leading and trailing six nodes as in the first filter; each interior pair
/// uses the fit on the pair plus five nodes on either side.
std::vector<double> interp_filter_second(std::span<const double> u, int degree = 6, int oscillation_degree = 2);

/// Savitzky-Golay smoothing with a symmetric window of 2m+1 nodes, and the
/// first/last window fit evaluated at the nodes it cannot centre.
std::vector<double> savitzky_golay(std::span<const double> u, int degree = 6, int half_window = 5);

/// The 1D filter applied to every grid line of every axis in turn.
/// Spectral filtering requires a periodic grid.
Field apply_filter(const BlockGrid& grid, const Field& u, const FilterSpec& spec);

Field spectral_filter(const BlockGrid& grid, const Field& u);
Field spectral_filter_2d(const BlockGrid& grid, const Field& u);

}  // namespace eisbfd
