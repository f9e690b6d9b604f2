#include "eisbfd/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include "eisbfd/dg_equiv.hpp"
#include "eisbfd/error.hpp"
#include "eisbfd/filters.hpp"
#include "eisbfd/harness.hpp"
#include "eisbfd/stability.hpp"
#include "eisbfd/symbols.hpp"

namespace eisbfd::cli {
namespace {

/// Raised for invalid user input detected after parsing.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct Settings {
  std::string case_name;
  std::string case_file;
  std::vector<int> n;
  std::string c = "optimal";
  std::string filter = "none";
  std::optional<double> dt;
  double safety = 0.5;
  std::optional<double> t_final;
  std::string out;
  bool allow_unstable = false;
  int c_samples = 201;
  std::optional<double> tol;
  std::string scheme = "rk6";
  std::string source = "consistent";
  int degree = 6;
  int oscillation_degree = 2;
  int half_window = 5;
  double dt_control_tol = 0.01;
  double length = 2 * std::numbers::pi;
  double h = 0.1;
  std::string kind;
  std::string in;
};

constexpr int kPrecision = 17;

std::filesystem::path output_dir(const Settings& s) {
  std::filesystem::path dir(s.out);
  std::filesystem::create_directories(dir);
  return dir;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream file(path);
  if (!file) throw UsageError("cannot write " + path.string());
  file.precision(kPrecision);
  return file;
}

TestCase resolve_case(const Settings& s, const std::string& fallback) {
  if (!s.case_file.empty()) return load_case_file(s.case_file);
  return find_case(s.case_name.empty() ? fallback : s.case_name);
}

FilterSpec make_filter(const Settings& s, const std::string& kind) {
  FilterSpec spec;
  spec.kind = parse_filter_kind(kind);
  spec.degree = s.degree;
  spec.oscillation_degree = s.oscillation_degree;
  spec.half_window = s.half_window;
  return spec;
}

RunOptions make_run_options(const Settings& s) {
  RunOptions run;
  run.dt = s.dt;
  run.safety = s.safety;
  run.t_final = s.t_final;
  run.scheme = &scheme_by_name(s.scheme);
  run.allow_unstable = s.allow_unstable;
  if (s.source == "consistent") {
    run.source = SourceMode::rk_consistent;
  } else if (s.source == "stage") {
    run.source = SourceMode::stage_times;
  } else {
    throw UsageError("--source must be stage or consistent");
  }
  return run;
}

double checked_c(const Settings& s) {
  const double c = parse_c(s.c);
  if (std::abs(c) > 1 && !s.allow_unstable) {
    throw UsageError("c = " + s.c + " lies outside [-1, 1] where stability is certified; pass --allow-unstable");
  }
  return c;
}

void write_field_csv(std::ostream& out, const BlockGrid& grid, const std::vector<std::pair<std::string, std::span<const double>>>& columns) {
  static const char* axes[] = {"x", "y", "z"};
  for (int a = 0; a < grid.dim(); ++a) out << axes[a] << ',';
  for (std::size_t k = 0; k < columns.size(); ++k) out << columns[k].first << (k + 1 < columns.size() ? "," : "\n");
  const auto old_precision = out.precision(kPrecision);
  for (std::size_t i = 0; i < grid.node_count(); ++i) {
    const auto p = grid.coordinates(i);
    for (int a = 0; a < grid.dim(); ++a) out << p[a] << ',';
    for (std::size_t k = 0; k < columns.size(); ++k) out << columns[k].second[i] << (k + 1 < columns.size() ? "," : "\n");
  }
  out.precision(old_precision);
}

int cmd_solve(const Settings& s, int required_dim, std::ostream& out) {
  const std::string fallback = required_dim == 2 ? "dirichlet2d" : "dirichlet1d";
  const TestCase tc = resolve_case(s, fallback);
  if (required_dim != 0 && tc.dim != required_dim) {
    throw UsageError("case " + tc.name + " is " + std::to_string(tc.dim) + "D, this command expects " +
                     std::to_string(required_dim) + "D");
  }
  if (s.n.size() > 1) throw UsageError("solve takes a single --n");
  const int n = s.n.empty() ? tc.resolutions.front() : s.n.front();
  if (n < 3) throw InvalidSize("--n must be at least 3 cells, got " + std::to_string(n));
  const double c = checked_c(s);
  const FilterSpec filter = make_filter(s, s.filter);

  const RunResult r = run_case(tc, n, c, filter, make_run_options(s));
  out.precision(kPrecision);
  out << "case,N,h,c,filter,dt,steps,err_l2,err_linf,raw_err_l2,raw_err_linf\n"
      << tc.name << ',' << r.n_cells << ',' << r.h << ',' << c << ',' << filter_name(filter.kind) << ',' << r.dt
      << ',' << r.steps << ',' << r.norms.l2 << ',' << r.norms.linf << ',' << r.raw_norms.l2 << ','
      << r.raw_norms.linf << '\n';

  if (!s.out.empty()) {
    const BlockGrid grid = make_operator(tc, n, c, s.allow_unstable).grid();
    std::vector<double> error(r.exact.size());
    for (std::size_t i = 0; i < error.size(); ++i) error[i] = r.solution.values[i] - r.exact[i];
    auto file = open_output(output_dir(s) / "solution.csv");
    write_field_csv(file, grid,
                    {{"value", r.solution.values}, {"raw", r.raw.values}, {"exact", r.exact}, {"error", error}});
  }
  return kExitSuccess;
}

int cmd_convergence(const Settings& s, std::ostream& out) {
  const TestCase tc = resolve_case(s, "dirichlet1d");
  const double c = checked_c(s);
  const FilterSpec filter = make_filter(s, s.filter);
  StudyOptions options;
  options.resolutions = s.n;
  options.run = make_run_options(s);
  options.dt_control_tol = s.dt_control_tol;
  for (int n : options.resolutions) {
    if (n < 3) throw InvalidSize("every --n must be at least 3 cells, got " + std::to_string(n));
  }

  const ConvergenceReport report = convergence_study(tc, c, filter, options);
  write_csv(report, out);
  out.precision(kPrecision);
  out << "# slope_fit=" << report.slope_fit << " raw_slope_fit=" << report.raw_slope_fit
      << " slope_fit_all=" << report.slope_fit_all << " dt_factor=" << report.dt_factor << '\n';
  if (!s.out.empty()) {
    const auto dir = output_dir(s);
    auto csv = open_output(dir / "convergence.csv");
    write_csv(report, csv);
    auto plot = open_output(dir / "convergence_plot.csv");
    write_plot_data(report, plot);
  }
  return kExitSuccess;
}

int cmd_symbols(const Settings& s, std::ostream& out) {
  if (s.n.size() > 1) throw UsageError("symbols takes a single --n");
  const int n = s.n.empty() ? 16 : s.n.front();
  if (n < 2 || n % 2 != 0) throw InvalidSize("symbols needs an even --n >= 2, got " + std::to_string(n));
  if (!(s.length > 0)) throw InvalidDomain("--length must be positive");
  const double c = checked_c(s);

  std::ostringstream table;
  table.precision(kPrecision);
  table << "omega,nu,q1,q2,abs_r1,abs_r2\n";
  for (int omega = -n / 2 + 1; omega <= n / 2; ++omega) {
    const SymbolPair p = compute_symbols(omega, n, c, s.length);
    table << p.omega << ',' << p.nu << ',' << p.q1 << ',' << p.q2 << ',' << std::abs(p.r1) << ','
          << std::abs(p.r2) << '\n';
  }
  out << table.str();
  if (!s.out.empty()) open_output(output_dir(s) / "symbols.csv") << table.str();
  return kExitSuccess;
}

int cmd_stability(const Settings& s, std::ostream& out) {
  if (s.c_samples < 2) throw UsageError("--c-samples must be at least 2");
  const double tol = s.tol.value_or(1e-10);
  const auto samples = uniform_samples(s.c_samples);
  const CertificationReport report = certify_interior(samples, tol);

  std::ostringstream table;
  table.precision(kPrecision);
  table << "c,max_eig_reduced,d1,d2,d3,inertia_ok,rank_ok,max_eig_boundary,pass\n";
  for (const CertificationRow& row : report.rows) {
    table << row.c << ',' << row.reduced_eigenvalues.back() << ',' << row.diagonal[0] << ',' << row.diagonal[1]
          << ',' << row.diagonal[2] << ',' << row.inertia_ok << ',' << row.rank_ok << ','
          << row.boundary_eigenvalues.back() << ',' << (row.passed() ? "pass" : "FAIL") << '\n';
  }
  out << table.str();
  if (!s.out.empty()) open_output(output_dir(s) / "stability.csv") << table.str();

  const auto failures = report.failures_in_range();
  if (!failures.empty()) {
    std::ostringstream msg;
    msg << "stability certificate failed at " << failures.size() << " sample(s), first c = " << failures.front()
        << ": interface form not negative semidefinite";
    throw NumericalFailure(msg.str());
  }
  out << "# certified " << report.rows.size() << " samples, tol " << tol << '\n';
  return kExitSuccess;
}

int cmd_dg_check(const Settings& s, std::ostream& out) {
  if (!(s.h > 0)) throw InvalidDomain("--cell-width must be positive");
  const double tol = s.tol.value_or(1e-12);
  std::vector<double> c_values{-1.0, -4.0 / 13, -0.25, 0.0, 1.0};
  const std::vector<std::pair<double, double>> weights{{0.5, 0.5}, {1.0, 0.0}, {0.25, 0.75}};
  const auto checks = run_equivalence_checks(c_values, weights, s.h, tol);

  bool ok = true;
  out.precision(6);
  out << "check,max_abs_difference,pass\n";
  for (const EquivalenceCheck& check : checks) {
    out << check.label << ',' << check.max_abs_difference << ',' << (check.passed ? "pass" : "FAIL") << '\n';
    ok = ok && check.passed;
  }
  if (!ok) throw NumericalFailure("weak-form blocks differ from the block finite difference rows");
  return kExitSuccess;
}

/// Field CSV: coordinate columns x[,y[,z]] followed by a `value` column;
/// other columns are ignored. Rows follow the grid's flat order.
struct FieldTable {
  int dim = 0;
  std::vector<std::array<double, 3>> points;
  std::vector<double> values;
};

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream stream(line);
  std::string cell;
  while (std::getline(stream, cell, ',')) cells.push_back(cell);
  return cells;
}

FieldTable read_field_csv(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw UsageError(source + ": empty field file");
  const auto header = split_csv(line);
  FieldTable table;
  static const char* axes[] = {"x", "y", "z"};
  while (table.dim < 3 && table.dim < static_cast<int>(header.size()) && header[table.dim] == axes[table.dim]) {
    ++table.dim;
  }
  const auto value_it = std::find(header.begin(), header.end(), "value");
  if (table.dim == 0 || value_it == header.end()) {
    throw UsageError(source + ": header must start with x[,y[,z]] and contain a value column");
  }
  const std::size_t value_col = static_cast<std::size_t>(value_it - header.begin());
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) throw UsageError(source + ":" + std::to_string(number) + ": wrong column count");
    try {
      std::array<double, 3> p{};
      for (int a = 0; a < table.dim; ++a) p[a] = std::stod(cells[a]);
      table.points.push_back(p);
      table.values.push_back(std::stod(cells[value_col]));
    } catch (const std::logic_error&) {
      throw UsageError(source + ":" + std::to_string(number) + ": not a number");
    }
  }
  return table;
}

/// Rebuilds the block grid from the node coordinates and checks the layout.
BlockGrid grid_from_table(const FieldTable& table, bool periodic) {
  const std::size_t total = table.points.size();
  const auto per_axis = static_cast<std::size_t>(std::llround(std::pow(double(total), 1.0 / table.dim)));
  std::size_t expected = 1;
  for (int a = 0; a < table.dim; ++a) expected *= per_axis;
  if (per_axis < 6 || per_axis % 2 != 0 || expected != total) {
    throw InvalidSize("field has " + std::to_string(total) + " nodes, not an even tensor grid of at least 3 cells");
  }
  const int n_cells = static_cast<int>(per_axis / 2);
  const double h = 2 * (table.points[1][0] - table.points[0][0]);
  if (!(h > 0)) throw UsageError("field nodes are not in increasing x order");
  BlockGrid grid(table.dim, build_grid_1d(n_cells, n_cells * h, periodic));
  const double length = grid.length();
  for (std::size_t i = 0; i < total; ++i) {
    const auto p = grid.coordinates(i);
    for (int a = 0; a < table.dim; ++a) {
      if (std::abs(p[a] - table.points[i][a]) > 1e-9 * length) {
        throw UsageError("field row " + std::to_string(i + 1) + " is not a node of a uniform block grid");
      }
    }
  }
  return grid;
}

int cmd_filter(const Settings& s, std::ostream& out) {
  if (s.kind.empty()) throw UsageError("filter needs --kind");
  if (s.in.empty()) throw UsageError("filter needs --in");
  const FilterSpec spec = make_filter(s, s.kind);
  std::ifstream file(s.in);
  if (!file) throw UsageError("cannot read " + s.in);
  const FieldTable table = read_field_csv(file, s.in);
  const BlockGrid grid = grid_from_table(table, spec.kind == FilterKind::spectral);
  const Field filtered = apply_filter(grid, Field{table.values, 0.0}, spec);
  if (s.out.empty()) {
    write_field_csv(out, grid, {{"value", filtered.values}});
  } else {
    auto dest = open_output(s.out);
    write_field_csv(dest, grid, {{"value", filtered.values}});
  }
  return kExitSuccess;
}

}  // namespace

double parse_c(const std::string& text) {
  if (text == "optimal") return -4.0 / 13;
  auto parse_number = [&](const std::string& part) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(part, &used);
    } catch (const std::logic_error&) {
      used = 0;
    }
    if (used == 0 || used != part.size()) throw UsageError("cannot parse c = '" + text + "'");
    return v;
  };
  const auto slash = text.find('/');
  if (slash == std::string::npos) return parse_number(text);
  const double den = parse_number(text.substr(slash + 1));
  if (den == 0) throw UsageError("c has a zero denominator");
  return parse_number(text.substr(0, slash)) / den;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Block finite difference heat equation solver and verification tools", "eisbfd"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key = value file; command line flags take precedence");
  app.get_config_formatter_base()->arrayDelimiter(',');

  Settings s;
  app.add_option("--case", s.case_name, "Built-in case name");
  app.add_option("--case-file", s.case_file, "key = value file describing a custom case")->check(CLI::ExistingFile);
  app.add_option("--n", s.n, "Cells per axis; a comma separated ladder for convergence")->delimiter(',');
  app.add_option("--c", s.c, "Stencil parameter: decimal, p/q, or optimal (-4/13)");
  app.add_option("--filter", s.filter, "none, spectral, interp1, interp2 or sg");
  app.add_option("--dt", s.dt, "Fixed time step")->check(CLI::PositiveNumber);
  app.add_option("--safety", s.safety, "Fraction of the stable step")->check(CLI::Range(1e-6, 1.0));
  app.add_option("--t-final", s.t_final, "Final time")->check(CLI::NonNegativeNumber);
  app.add_option("--out", s.out, "Output directory (output file for filter)");
  app.add_flag("--allow-unstable", s.allow_unstable, "Permit |c| > 1 and steps beyond the stability bound");
  app.add_option("--c-samples", s.c_samples, "Number of equispaced c samples in [-1, 1]");
  app.add_option("--tol", s.tol, "Tolerance of the check")->check(CLI::PositiveNumber);
  app.add_option("--scheme", s.scheme, "rk6 or rk4");
  app.add_option("--source", s.source, "Forcing treatment: consistent or stage");
  app.add_option("--degree", s.degree, "Polynomial degree of the fit filters")->check(CLI::NonNegativeNumber);
  app.add_option("--oscillation-degree", s.oscillation_degree,
                 "Degree of the discarded (-1)^k part of the interpolation filters; -1 for a plain fit")
      ->check(CLI::Range(-1, 11));
  app.add_option("--half-window", s.half_window, "Savitzky-Golay half width m")->check(CLI::PositiveNumber);
  app.add_option("--dt-control-tol", s.dt_control_tol, "Finest-grid dt halving tolerance; 0 disables")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--length", s.length, "Domain length for symbols");
  app.add_option("--cell-width", s.h, "Cell width for dg-check");
  app.add_option("--kind", s.kind, "Filter kind for the filter command");
  app.add_option("--in", s.in, "Input Field CSV for the filter command");

  int code = kExitSuccess;
  auto add = [&](const std::string& name, const std::string& help, auto action) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    sub->callback([&, action] { code = action(); });
    return sub;
  };
  add("solve", "Integrate one case to its final time", [&] { return cmd_solve(s, 0, out); });
  add("solve1d", "Integrate a 1D case", [&] { return cmd_solve(s, 1, out); });
  add("solve2d", "Integrate a 2D case", [&] { return cmd_solve(s, 2, out); });
  add("convergence", "Run a resolution ladder and fit slopes", [&] { return cmd_convergence(s, out); });
  add("symbols", "Tabulate the block symbols for one N", [&] { return cmd_symbols(s, out); });
  add("stability-check", "Certify the interface forms over c in [-1, 1]", [&] { return cmd_stability(s, out); });
  add("dg-check", "Compare weak-form blocks with the finite difference rows", [&] { return cmd_dg_check(s, out); });
  add("filter", "Filter a Field CSV", [&] { return cmd_filter(s, out); });

  std::vector<std::string> argv_storage{"eisbfd"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int status = app.exit(e, out, err);
    return status == 0 ? kExitSuccess : kExitUsage;
  } catch (const NumericalFailure& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  } catch (const StabilityRefusal& e) {
    err << "error: " << e.what() << "; try --dt " << e.suggested_dt() << '\n';
    return kExitFailure;
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return code;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace eisbfd::cli
