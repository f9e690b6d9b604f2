#include "eisbfd/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "eisbfd/error.hpp"

namespace eisbfd {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    std::size_t used = 0;
    int value = 0;
    try {
      value = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw ConfigurationError("not an integer: '" + item + "'");
    out.push_back(value);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double value = 0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) throw ConfigurationError("bad value for " + key + ": '" + text + "'");
  return value;
}

}  // namespace

ErrorNorms error_norms(const BlockGrid& grid, std::span<const double> numeric, std::span<const double> exact) {
  if (numeric.size() != grid.node_count() || exact.size() != grid.node_count()) {
    throw DimensionError("error norms: vector length does not match the grid");
  }
  ErrorNorms e;
  double sum = 0;
  for (std::size_t i = 0; i < numeric.size(); ++i) {
    const double d = numeric[i] - exact[i];
    sum += d * d;
    e.linf = std::max(e.linf, std::abs(d));
  }
  e.l2 = std::sqrt(sum * std::pow(grid.h() / 2, grid.dim()));
  return e;
}

SpatialOperator make_operator(const TestCase& tc, int n_cells, double c, bool allow_unstable) {
  const bool periodic = tc.mode == BoundaryMode::periodic;
  BlockGrid grid(tc.dim, BlockGrid1D(n_cells, tc.length, periodic));
  std::optional<BoundaryData> data;
  if (!periodic) {
    if (!tc.boundary) throw ConfigurationError("case " + tc.name + " has no boundary data");
    data = tc.boundary();
  }
  return SpatialOperator(std::move(grid), c, tc.mode, std::move(data), allow_unstable);
}

RunResult run_case(const TestCase& tc, int n_cells, double c, const FilterSpec& filter, const RunOptions& options) {
  const SpatialOperator op = make_operator(tc, n_cells, c, options.allow_unstable);
  const BlockGrid& grid = op.grid();
  const double t_final = options.t_final.value_or(tc.t_final);
  const RKScheme& scheme = options.scheme ? *options.scheme : butcher6();

  RunResult r;
  r.n_cells = n_cells;
  r.h = grid.h();
  const double dt_max = options.dt ? *options.dt : options.dt_factor * stable_dt(op, options.safety, scheme);
  Field initial{sample(grid, tc.u, 0.0), 0.0};

  SourceFn forcing;
  if (tc.forcing) {
    std::vector<Point> points(grid.node_count());
    for (std::size_t i = 0; i < points.size(); ++i) points[i] = grid.coordinates(i);
    forcing = [points = std::move(points), f = tc.forcing](double t, std::span<double> out) {
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(points[i], t);
    };
  }

  if (t_final > 0) {
    const TimeGrid tg = make_time_grid(t_final, dt_max);
    r.dt = tg.dt;
    r.steps = tg.steps;
    IntegrateOptions io;
    io.scheme = &scheme;
    io.source = options.source;
    io.allow_unstable = options.allow_unstable;
    try {
      r.raw = integrate(op, initial, forcing, t_final, tg.dt, io);
    } catch (const DivergenceError& e) {
      std::ostringstream msg;
      msg << tc.name << ": N = " << n_cells << ", dt = " << tg.dt << ": " << e.what();
      throw DivergenceError(msg.str(), e.step());
    }
  } else {
    r.raw = initial;
  }
  r.exact = sample(grid, tc.u, t_final);
  r.solution = apply_filter(grid, r.raw, filter);
  r.raw_norms = error_norms(grid, r.raw.values, r.exact);
  r.norms = error_norms(grid, r.solution.values, r.exact);
  return r;
}

double fit_slope(std::span<const double> h, std::span<const double> err) {
  if (h.size() != err.size() || h.size() < 2) throw InvalidSize("slope fit needs at least two points");
  const std::size_t n = h.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(h[i]);
    my += std::log(err[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(h[i]) - mx;
    sxy += dx * (std::log(err[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

ConvergenceReport convergence_study(const TestCase& tc, double c, const FilterSpec& filter,
                                    const StudyOptions& options) {
  std::vector<int> ladder = options.resolutions.empty() ? tc.resolutions : options.resolutions;
  if (ladder.size() < 3) throw InvalidSize("a convergence study needs at least three resolutions");
  std::sort(ladder.begin(), ladder.end());

  ConvergenceReport report;
  report.case_name = tc.name;
  report.c = c;
  report.filter = filter_name(filter.kind);

  RunOptions run = options.run;
  std::vector<RunResult> results(ladder.size());

  // Step-size control on the finest grid: keep halving dt while that lowers
  // the error by at least the tolerance. A halving that raises the error
  // means round-off already dominates, so it is not adopted either.
  const int finest = ladder.back();
  RunResult current = run_case(tc, finest, c, filter, run);
  if (options.dt_control_tol > 0 && !run.dt) {
    for (int halving = 0;; ++halving) {
      RunOptions half = run;
      half.dt_factor = run.dt_factor / 2;
      RunResult refined = run_case(tc, finest, c, filter, half);
      report.dt_control_change = std::abs(refined.norms.l2 - current.norms.l2) / refined.norms.l2;
      const bool lowered = refined.norms.l2 < current.norms.l2;
      if (!lowered || report.dt_control_change < options.dt_control_tol) break;
      if (halving + 1 >= options.max_halvings) {
        run = half;
        current = std::move(refined);
        break;
      }
      run = half;
      current = std::move(refined);
    }
  }
  report.dt_factor = run.dt_factor;
  results.back() = std::move(current);

  // Resolutions are run one after another; each operator application is
  // already parallel across grid lines.
  for (std::size_t i = 0; i + 1 < ladder.size(); ++i) results[i] = run_case(tc, ladder[i], c, filter, run);

  std::vector<double> hs, errs, raw_errs;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    ConvergenceRow row;
    row.n_cells = ladder[i];
    row.h = results[i].h;
    row.dt = results[i].dt;
    row.norms = results[i].norms;
    row.raw_norms = results[i].raw_norms;
    row.slope_pairwise = std::numeric_limits<double>::quiet_NaN();
    if (i > 0) {
      const ConvergenceRow& prev = report.rows.back();
      row.slope_pairwise = std::log(row.norms.l2 / prev.norms.l2) / std::log(row.h / prev.h);
    }
    report.rows.push_back(row);
    hs.push_back(row.h);
    errs.push_back(row.norms.l2);
    raw_errs.push_back(row.raw_norms.l2);
  }
  const std::size_t k = hs.size();
  report.slope_fit = fit_slope(std::span(hs).subspan(k - 3), std::span(errs).subspan(k - 3));
  report.slope_fit_all = fit_slope(hs, errs);
  report.raw_slope_fit = fit_slope(std::span(hs).subspan(k - 3), std::span(raw_errs).subspan(k - 3));
  return report;
}

void write_csv(const ConvergenceReport& report, std::ostream& out, bool header) {
  if (header) out << "case,N,h,c,filter,err_l2,err_linf,slope_pairwise,slope_fit\n";
  const auto old_precision = out.precision(17);
  for (const ConvergenceRow& row : report.rows) {
    out << report.case_name << ',' << row.n_cells << ',' << row.h << ',' << report.c << ',' << report.filter << ','
        << row.norms.l2 << ',' << row.norms.linf << ',';
    if (std::isnan(row.slope_pairwise)) {
      out << "nan";
    } else {
      out << row.slope_pairwise;
    }
    out << ',' << report.slope_fit << '\n';
  }
  out.precision(old_precision);
}

void write_plot_data(const ConvergenceReport& report, std::ostream& out) {
  out << "log10_h,log10_err_l2,log10_err_linf\n";
  const auto old_precision = out.precision(17);
  for (const ConvergenceRow& row : report.rows) {
    out << std::log10(row.h) << ',' << std::log10(row.norms.l2) << ',' << std::log10(row.norms.linf) << '\n';
  }
  out.precision(old_precision);
}

std::vector<TestCase> builtin_cases() {
  const double two_pi = 2 * std::numbers::pi;
  std::vector<TestCase> cases;
  cases.push_back(make_expcos_case("dirichlet1d", 1, BoundaryMode::dirichlet, 1.0, 1.0, 1.0, {24, 36, 48, 60, 72}));
  cases.push_back(make_expcos_case("periodic2d", 2, BoundaryMode::periodic, two_pi, 1.0, 1.0, {50, 60, 70, 80}));
  cases.push_back(
      make_expcos_case("dirichlet2d", 2, BoundaryMode::dirichlet, 1.0, 1.0, 1.0, {24, 36, 48, 60, 72, 96}));
  cases.push_back(make_expcos_case("periodic1d", 1, BoundaryMode::periodic, two_pi, 1.0, 1.0, {20, 30, 40, 50, 60}));
  cases.push_back(make_mode_case("mode1d", 2, two_pi, 0.5, {16, 32, 64, 128}));
  cases.push_back(make_constant_case("constant1d", 1, BoundaryMode::dirichlet, 1.5, 1.0, 0.1, {6, 12, 24}));
  return cases;
}

TestCase find_case(const std::string& name) {
  for (TestCase& tc : builtin_cases()) {
    if (tc.name == name) return tc;
  }
  throw ConfigurationError("unknown case '" + name + "'");
}

std::map<std::string, std::string> read_key_value_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot read " + path);
  std::map<std::string, std::string> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigurationError(path + ":" + std::to_string(number) + ": expected key = value");
    }
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

TestCase load_case_file(const std::string& path) {
  const auto kv = read_key_value_file(path);
  auto get = [&](const std::string& key, const std::string& fallback) {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
  };
  static const std::vector<std::string> known{"family", "dim",     "boundary",    "wavenumber", "mode",
                                              "value",  "length",  "t_final",     "resolutions", "name"};
  for (const auto& [key, value] : kv) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigurationError(path + ": unknown key '" + key + "'");
    }
  }
  const std::string family = get("family", "expcos");
  const std::string name = get("name", "custom");
  const int dim = static_cast<int>(parse_double("dim", get("dim", "1")));
  const std::string boundary = get("boundary", "dirichlet");
  if (boundary != "periodic" && boundary != "dirichlet") throw ConfigurationError("boundary must be periodic or dirichlet");
  const BoundaryMode mode = boundary == "periodic" ? BoundaryMode::periodic : BoundaryMode::dirichlet;
  const double length = parse_double("length", get("length", "1"));
  const double t_final = parse_double("t_final", get("t_final", "1"));
  const std::vector<int> ladder = parse_int_list(get("resolutions", "24,36,48"));

  if (family == "expcos") {
    return make_expcos_case(name, dim, mode, parse_double("wavenumber", get("wavenumber", "1")), length, t_final,
                            ladder);
  }
  if (family == "mode") {
    if (dim != 1 || mode != BoundaryMode::periodic) throw ConfigurationError("mode family is 1D periodic only");
    return make_mode_case(name, static_cast<int>(parse_double("mode", get("mode", "1"))), length, t_final, ladder);
  }
  if (family == "constant") {
    return make_constant_case(name, dim, mode, parse_double("value", get("value", "1")), length, t_final, ladder);
  }
  throw ConfigurationError("unknown family '" + family + "'");
}

}  // namespace eisbfd
