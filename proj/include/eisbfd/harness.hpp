#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eisbfd/filters.hpp"
#include "eisbfd/manufactured.hpp"
#include "eisbfd/runge_kutta.hpp"

namespace eisbfd {

struct ErrorNorms {
  double l2 = 0;    ///< |E|_2 scaled by sqrt(h/2) per dimension
  double linf = 0;
};

ErrorNorms error_norms(const BlockGrid& grid, std::span<const double> numeric, std::span<const double> exact);

struct RunOptions {
  /// Explicit step; when absent, dt = dt_factor * stable_dt(op, safety).
  std::optional<double> dt;
  double safety = 0.5;
  double dt_factor = 1.0;
  std::optional<double> t_final;  ///< overrides the case's final time
  SourceMode source = SourceMode::rk_consistent;
  const RKScheme* scheme = nullptr;
  bool allow_unstable = false;
};

struct RunResult {
  int n_cells = 0;
  double h = 0;
  double dt = 0;
  long steps = 0;
  Field solution;  ///< after filtering
  Field raw;       ///< before filtering
  std::vector<double> exact;
  ErrorNorms norms;      ///< of the filtered solution
  ErrorNorms raw_norms;  ///< of the unfiltered solution
};

/// Builds grid and operator, integrates from the exact initial data,
/// filters, and measures the error at the final time.
/// Divergence is rethrown with N and dt in the message.
RunResult run_case(const TestCase& tc, int n_cells, double c, const FilterSpec& filter = {},
                   const RunOptions& options = {});

SpatialOperator make_operator(const TestCase& tc, int n_cells, double c, bool allow_unstable = false);

/// Least-squares slope p of log(err) = p log(h) + const.
double fit_slope(std::span<const double> h, std::span<const double> err);

struct ConvergenceRow {
  int n_cells = 0;
  double h = 0;
  double dt = 0;
  ErrorNorms norms;      ///< of the filtered solution
  ErrorNorms raw_norms;  ///< of the unfiltered solution
  double slope_pairwise = 0;  ///< with the previous (coarser) row; NaN for the first
};

struct ConvergenceReport {
  std::string case_name;
  double c = 0;
  std::string filter;
  std::vector<ConvergenceRow> rows;
  double slope_fit = 0;     ///< L2 regression over the three finest rows
  double slope_fit_all = 0; ///< L2 regression over all rows
  double raw_slope_fit = 0; ///< slope_fit of the unfiltered errors
  double dt_factor = 1;     ///< global factor applied to every per-resolution dt
  double dt_control_change = 0;  ///< relative change of the finest error under a dt halving
};

struct StudyOptions {
  std::vector<int> resolutions;  ///< overrides the case's ladder when non-empty
  RunOptions run;
  /// Halve dt_factor while a halving lowers the finest-grid error by at least
  /// this fraction; zero disables the control.
  double dt_control_tol = 0.01;
  int max_halvings = 4;
};

ConvergenceReport convergence_study(const TestCase& tc, double c, const FilterSpec& filter = {},
                                    const StudyOptions& options = {});

/// Header: case,N,h,c,filter,err_l2,err_linf,slope_pairwise,slope_fit
void write_csv(const ConvergenceReport& report, std::ostream& out, bool header = true);
/// log10(h), log10(err_l2), log10(err_linf) per row.
void write_plot_data(const ConvergenceReport& report, std::ostream& out);

/// Registry of the built-in problems.
std::vector<TestCase> builtin_cases();
/// Throws ConfigurationError for unknown names.
TestCase find_case(const std::string& name);

/// Reads a key=value file describing a custom manufactured problem:
/// family (expcos|mode|constant), dim, boundary (periodic|dirichlet),
/// wavenumber, mode, value, length, t_final, resolutions (comma separated), name.
TestCase load_case_file(const std::string& path);

/// Parses `key = value` lines; '#' starts a comment. Throws ConfigurationError
/// on malformed lines or an unreadable file.
std::map<std::string, std::string> read_key_value_file(const std::string& path);

}  // namespace eisbfd
