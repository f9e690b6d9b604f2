#include "eisbfd/runge_kutta.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include "eisbfd/error.hpp"

namespace eisbfd {
namespace {

// Rooted trees are built bottom-up: a tree is a multiset of child trees,
// stored as nondecreasing indices into the list of smaller trees.
struct Tree {
  std::vector<int> children;
  int order = 1;
  double gamma = 1;
};

std::vector<Tree> rooted_trees(int max_order) {
  std::vector<Tree> trees{Tree{}};
  for (int n = 2; n <= max_order; ++n) {
    const std::size_t known = trees.size();
    std::vector<int> pick;
    // Choose children with nondecreasing index and total order n - 1.
    std::function<void(int, int)> extend = [&](int start, int remaining) {
      if (remaining == 0) {
        Tree t;
        t.children = pick;
        t.order = n;
        t.gamma = n;
        for (int child : pick) t.gamma *= trees[static_cast<std::size_t>(child)].gamma;
        trees.push_back(t);
        return;
      }
      for (int k = start; k < static_cast<int>(known); ++k) {
        const int o = trees[static_cast<std::size_t>(k)].order;
        if (o > remaining) continue;
        pick.push_back(k);
        extend(k, remaining - o);
        pick.pop_back();
      }
    };
    extend(0, n - 1);
  }
  return trees;
}

RKScheme make_butcher6() {
  RKScheme s;
  s.name = "butcher6";
  s.order = 6;
  s.a = Eigen::MatrixXd::Zero(7, 7);
  s.a(1, 0) = 1.0 / 3;
  s.a(2, 1) = 2.0 / 3;
  s.a(3, 0) = 1.0 / 12;
  s.a(3, 1) = 1.0 / 3;
  s.a(3, 2) = -1.0 / 12;
  s.a(4, 0) = -1.0 / 16;
  s.a(4, 1) = 9.0 / 8;
  s.a(4, 2) = -3.0 / 16;
  s.a(4, 3) = -3.0 / 8;
  s.a(5, 1) = 9.0 / 8;
  s.a(5, 2) = -3.0 / 8;
  s.a(5, 3) = -3.0 / 4;
  s.a(5, 4) = 1.0 / 2;
  s.a(6, 0) = 9.0 / 44;
  s.a(6, 1) = -9.0 / 11;
  s.a(6, 2) = 63.0 / 44;
  s.a(6, 3) = 18.0 / 11;
  s.a(6, 5) = -16.0 / 11;
  s.b.resize(7);
  s.b << 11.0 / 120, 0, 27.0 / 40, 27.0 / 40, -4.0 / 15, -4.0 / 15, 11.0 / 120;
  s.c.resize(7);
  s.c << 0, 1.0 / 3, 2.0 / 3, 1.0 / 3, 1.0 / 2, 1.0 / 2, 1;
  return s;
}

RKScheme make_classic4() {
  RKScheme s;
  s.name = "rk4";
  s.order = 4;
  s.a = Eigen::MatrixXd::Zero(4, 4);
  s.a(1, 0) = 0.5;
  s.a(2, 1) = 0.5;
  s.a(3, 2) = 1.0;
  s.b.resize(4);
  s.b << 1.0 / 6, 1.0 / 3, 1.0 / 3, 1.0 / 6;
  s.c.resize(4);
  s.c << 0, 0.5, 0.5, 1;
  return s;
}

const RKScheme& validated(const RKScheme& s) {
  const OrderConditionReport r = check_order_conditions(s, s.order);
  if (!r.passed) {
    std::ostringstream msg;
    msg << "tableau " << s.name << " fails its order conditions (residual " << r.max_residual << ")";
    throw ConfigurationError(msg.str());
  }
  return s;
}

// Coefficients of the stability polynomial, index k multiplies z^k.
std::vector<double> stability_coefficients(const RKScheme& s) {
  std::vector<double> coef{1.0};
  Eigen::VectorXd v = Eigen::VectorXd::Ones(s.stages());
  for (int k = 1; k <= s.stages(); ++k) {
    coef.push_back(s.b.dot(v));
    v = s.a * v;
  }
  return coef;
}

// Monomial coefficients of the Lagrange basis on Chebyshev-Lobatto points in [-1, 1].
constexpr int kSamples = 8;

struct ChebyshevBasis {
  std::array<double, kSamples> points{};
  Eigen::Matrix<double, kSamples, kSamples> coeffs;  // coeffs(m, j): tau^m coefficient of l_j

  ChebyshevBasis() {
    Eigen::Matrix<double, kSamples, kSamples> vander;
    for (int j = 0; j < kSamples; ++j) {
      points[static_cast<std::size_t>(j)] = -std::cos(std::numbers::pi * j / (kSamples - 1));
      for (int m = 0; m < kSamples; ++m) vander(j, m) = std::pow(points[static_cast<std::size_t>(j)], m);
    }
    coeffs = vander.inverse();
  }
};

const ChebyshevBasis& chebyshev_basis() {
  static const ChebyshevBasis basis;
  return basis;
}

void check_finite(std::span<const double> v, long step, double t) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      std::ostringstream msg;
      msg << "non-finite value at step " << step << " (t = " << t << ")";
      throw DivergenceError(msg.str(), step);
    }
  }
}

}  // namespace

OrderConditionReport check_order_conditions(const RKScheme& scheme, int order, double tol) {
  OrderConditionReport report;
  const int s = scheme.stages();
  for (int i = 0; i < s; ++i) {
    report.row_sum_residual = std::max(report.row_sum_residual, std::abs(scheme.c(i) - scheme.a.row(i).sum()));
  }
  const std::vector<Tree> trees = rooted_trees(order);
  // phi[k] holds the stage weights of tree k: product over children of A * phi(child).
  std::vector<Eigen::VectorXd> phi;
  phi.reserve(trees.size());
  for (const Tree& t : trees) {
    Eigen::VectorXd v = Eigen::VectorXd::Ones(s);
    for (int child : t.children) v = v.cwiseProduct(scheme.a * phi[static_cast<std::size_t>(child)]);
    phi.push_back(v);
    report.max_residual = std::max(report.max_residual, std::abs(scheme.b.dot(v) - 1.0 / t.gamma));
  }
  report.trees_checked = static_cast<int>(trees.size());
  report.passed = report.max_residual <= tol && report.row_sum_residual <= tol;
  return report;
}

const RKScheme& butcher6() {
  static const RKScheme s = make_butcher6();
  static const RKScheme& checked = validated(s);
  return checked;
}

const RKScheme& classic4() {
  static const RKScheme s = make_classic4();
  static const RKScheme& checked = validated(s);
  return checked;
}

const RKScheme& scheme_by_name(const std::string& name) {
  if (name == "butcher6" || name == "rk6") return butcher6();
  if (name == "rk4" || name == "classic4") return classic4();
  throw ConfigurationError("unknown Runge-Kutta scheme '" + name + "'");
}

std::complex<double> stability_function(const RKScheme& scheme, std::complex<double> z) {
  const std::vector<double> coef = stability_coefficients(scheme);
  std::complex<double> acc = 0;
  for (auto it = coef.rbegin(); it != coef.rend(); ++it) acc = acc * z + *it;
  return acc;
}

double stability_interval(const RKScheme& scheme) {
  static std::mutex guard;
  static std::map<std::string, double> cache;
  std::lock_guard lock(guard);
  if (auto it = cache.find(scheme.name); it != cache.end()) return it->second;

  auto excess = [&](double x) { return std::abs(stability_function(scheme, -x)) - 1.0; };
  // Scan outward for the first point where |R| exceeds 1, then bisect.
  const double step = 1e-3;
  double lo = 0, hi = step;
  while (excess(hi) <= 0) {
    lo = hi;
    hi += step;
    if (hi > 100) throw ConfigurationError("stability interval scan did not terminate");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) <= 0 ? lo : hi) = mid;
  }
  cache[scheme.name] = lo;
  return lo;
}

double stable_dt(const SpatialOperator& op, double safety, const RKScheme& scheme) {
  if (!(safety > 0 && safety <= 1)) throw ConfigurationError("safety factor must lie in (0, 1]");
  return safety * stability_interval(scheme) / op.spectral_radius_estimate();
}

TimeGrid make_time_grid(double t_final, double dt_max) {
  if (!(dt_max > 0)) throw ConfigurationError("time step must be positive");
  if (t_final < 0) throw ConfigurationError("final time must be non-negative");
  TimeGrid g;
  g.t_final = t_final;
  g.steps = static_cast<long>(std::ceil(t_final / dt_max * (1 - 1e-12)));
  g.dt = g.steps > 0 ? t_final / static_cast<double>(g.steps) : 0.0;
  return g;
}

Field integrate(const SpatialOperator& op, const Field& initial, const SourceFn& forcing, double t_final,
                double dt, const IntegrateOptions& options) {
  const RKScheme& rk = options.scheme ? *options.scheme : butcher6();
  const std::size_t n = op.size();
  if (initial.values.size() != n) throw DimensionError("initial field does not match the grid");
  if (!(dt > 0)) throw ConfigurationError("time step must be positive");
  const double limit = stable_dt(op, 1.0, rk);
  if (dt > limit * (1 + 1e-12) && !options.allow_unstable) {
    std::ostringstream msg;
    msg << "dt = " << dt << " exceeds the stability bound " << limit << " of " << rk.name;
    throw StabilityRefusal(msg.str(), 0.5 * limit);
  }

  const double t0 = initial.time;
  const TimeGrid grid = make_time_grid(t_final - t0, dt);
  const int s = rk.stages();
  const bool has_source = op.mode() == BoundaryMode::dirichlet || static_cast<bool>(forcing);

  using Vec = Eigen::VectorXd;
  Field state = initial;
  Eigen::Map<Vec> u(state.values.data(), static_cast<Eigen::Index>(n));
  std::vector<Vec> k(static_cast<std::size_t>(s), Vec(static_cast<Eigen::Index>(n)));
  Vec stage(static_cast<Eigen::Index>(n));
  Vec tmp(static_cast<Eigen::Index>(n));

  auto source_at = [&](double t, Vec& out) {
    op.lift(t, {out.data(), n});
    if (forcing) {
      forcing(t, {tmp.data(), n});
      out += tmp;
    }
  };

  // rk_consistent state: samples on the current window and per-stage weights.
  const ChebyshevBasis& cheb = chebyshev_basis();
  std::vector<Vec> samples;
  std::vector<Vec> stage_sources;
  Eigen::MatrixXd gamma;  // gamma(i, q) = (A^q 1)_i
  long window_steps = 1;
  if (has_source && options.source == SourceMode::rk_consistent) {
    samples.assign(kSamples, Vec(static_cast<Eigen::Index>(n)));
    stage_sources.assign(static_cast<std::size_t>(s), Vec(static_cast<Eigen::Index>(n)));
    gamma.resize(s, s);
    Vec v = Vec::Ones(s);
    for (int q = 0; q < s; ++q) {
      gamma.col(q) = v;
      v = rk.a * v;
    }
    window_steps = std::max<long>(1, static_cast<long>(std::floor(options.source_window / grid.dt)));
  }
  long window_start = -1;
  long window_len = 0;
  double window_mid = 0, window_half = 0;

  std::vector<const double*> sample_ptrs;
  for (const Vec& v : samples) sample_ptrs.push_back(v.data());
  std::vector<double> coef(static_cast<std::size_t>(s));
  std::vector<const double*> ptrs(static_cast<std::size_t>(s));
  // out = base + sum_t coef[t] * src[t]; base may alias out or be null.
  auto combine = [n](double* out, const double* base, const double* c, const double* const* src, int terms) {
    Eigen::Map<Vec> o(out, static_cast<Eigen::Index>(n));
    if (base == nullptr) {
      o.setZero();
    } else if (base != out) {
      o = Eigen::Map<const Vec>(base, static_cast<Eigen::Index>(n));
    }
    for (int t = 0; t < terms; ++t) o += c[t] * Eigen::Map<const Vec>(src[t], static_cast<Eigen::Index>(n));
  };

  // stage_times cache: distinct c values within one step share a source.
  std::map<double, Vec> stage_cache;

  for (long step = 0; step < grid.steps; ++step) {
    const double tn = t0 + static_cast<double>(step) * grid.dt;

    if (has_source && options.source == SourceMode::rk_consistent) {
      if (window_start < 0 || step >= window_start + window_len) {
        window_start = step;
        window_len = std::min(window_steps, grid.steps - step);
        window_half = 0.5 * static_cast<double>(window_len) * grid.dt;
        window_mid = tn + window_half;
        for (int j = 0; j < kSamples; ++j) source_at(window_mid + window_half * cheb.points[static_cast<std::size_t>(j)], samples[static_cast<std::size_t>(j)]);
      }
      // Derivatives of the interpolant at t_n, folded into stage weights.
      const double tau = (tn - window_mid) / window_half;
      const double ratio = grid.dt / window_half;
      Eigen::Matrix<double, Eigen::Dynamic, kSamples> weight = Eigen::MatrixXd::Zero(s, kSamples);
      for (int q = 0; q < s && q < kSamples; ++q) {
        // q-th tau-derivative of every Lagrange basis function at tau.
        Eigen::Matrix<double, 1, kSamples> deriv = Eigen::Matrix<double, 1, kSamples>::Zero();
        for (int m = q; m < kSamples; ++m) {
          double falling = 1;
          for (int r = 0; r < q; ++r) falling *= m - r;
          deriv += falling * std::pow(tau, m - q) * cheb.coeffs.row(m);
        }
        const double scale = std::pow(ratio, q);
        for (int i = 0; i < s; ++i) weight.row(i) += gamma(i, q) * scale * deriv;
      }
      for (int i = 0; i < s; ++i) {
        std::array<double, kSamples> w{};
        for (int j = 0; j < kSamples; ++j) w[static_cast<std::size_t>(j)] = weight(i, j);
        combine(stage_sources[static_cast<std::size_t>(i)].data(), nullptr, w.data(), sample_ptrs.data(), kSamples);
      }
    } else if (has_source) {
      stage_cache.clear();
    }

    for (int i = 0; i < s; ++i) {
      int terms = 0;
      for (int j = 0; j < i; ++j) {
        if (rk.a(i, j) == 0) continue;
        coef[static_cast<std::size_t>(terms)] = grid.dt * rk.a(i, j);
        ptrs[static_cast<std::size_t>(terms)] = k[static_cast<std::size_t>(j)].data();
        ++terms;
      }
      combine(stage.data(), u.data(), coef.data(), ptrs.data(), terms);
      Vec& ki = k[static_cast<std::size_t>(i)];
      op.apply_homogeneous({stage.data(), n}, {ki.data(), n});
      if (!has_source) continue;
      if (options.source == SourceMode::rk_consistent) {
        ki += stage_sources[static_cast<std::size_t>(i)];
      } else {
        const double ci = rk.c(i);
        auto it = stage_cache.find(ci);
        if (it == stage_cache.end()) {
          Vec src(static_cast<Eigen::Index>(n));
          source_at(tn + ci * grid.dt, src);
          it = stage_cache.emplace(ci, std::move(src)).first;
        }
        ki += it->second;
      }
    }
    int terms = 0;
    for (int i = 0; i < s; ++i) {
      if (rk.b(i) == 0) continue;
      coef[static_cast<std::size_t>(terms)] = grid.dt * rk.b(i);
      ptrs[static_cast<std::size_t>(terms)] = k[static_cast<std::size_t>(i)].data();
      ++terms;
    }
    combine(u.data(), u.data(), coef.data(), ptrs.data(), terms);
    check_finite(state.values, step + 1, tn + grid.dt);
  }
  state.time = grid.steps > 0 ? t_final : t0;
  return state;
}

Eigen::VectorXd integrate_ode(const RKScheme& scheme, const OdeRhs& rhs, Eigen::VectorXd y, double t0, double t1,
                              long steps) {
  if (steps <= 0) throw ConfigurationError("step count must be positive");
  const int s = scheme.stages();
  const double dt = (t1 - t0) / static_cast<double>(steps);
  std::vector<Eigen::VectorXd> k(static_cast<std::size_t>(s), Eigen::VectorXd(y.size()));
  Eigen::VectorXd stage(y.size());
  for (long step = 0; step < steps; ++step) {
    const double t = t0 + static_cast<double>(step) * dt;
    for (int i = 0; i < s; ++i) {
      stage = y;
      for (int j = 0; j < i; ++j) stage += dt * scheme.a(i, j) * k[static_cast<std::size_t>(j)];
      rhs(t + scheme.c(i) * dt, stage, k[static_cast<std::size_t>(i)]);
    }
    for (int i = 0; i < s; ++i) y += dt * scheme.b(i) * k[static_cast<std::size_t>(i)];
  }
  return y;
}

}  // namespace eisbfd
