#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "eisbfd/spatial_operator.hpp"

namespace eisbfd {

/// Explicit Runge-Kutta tableau. `a` is strictly lower triangular.
struct RKScheme {
  std::string name;
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  int order = 0;

  int stages() const noexcept { return static_cast<int>(b.size()); }
};

struct OrderConditionReport {
  int trees_checked = 0;
  double max_residual = 0;  ///< max |b^T Phi(t) - 1/gamma(t)| over trees up to the order
  double row_sum_residual = 0;  ///< max |c_i - sum_j a_ij|
  bool passed = false;
};

/// Checks b^T Phi(t) = 1/gamma(t) for every rooted tree with at most `order`
/// nodes (37 trees for order 6).
OrderConditionReport check_order_conditions(const RKScheme& scheme, int order, double tol = 1e-12);

/// Seven-stage, sixth-order explicit method. Order conditions are verified on
/// first use; a violation throws ConfigurationError.
const RKScheme& butcher6();
/// The classical four-stage method.
const RKScheme& classic4();
const RKScheme& scheme_by_name(const std::string& name);

/// Stability polynomial R(z) = sum_k (b^T A^{k-1} 1) z^k, with the k = 0 term 1.
std::complex<double> stability_function(const RKScheme& scheme, std::complex<double> z);

/// Length of the real negative interval [-x, 0] on which |R| <= 1.
/// Computed once per scheme by scanning then bisecting, and cached.
double stability_interval(const RKScheme& scheme);

/// safety * stability_interval / op.spectral_radius_estimate().
double stable_dt(const SpatialOperator& op, double safety, const RKScheme& scheme = butcher6());

struct TimeGrid {
  double t_final = 0;
  double dt = 0;
  long steps = 0;
};

/// Uniform steps of size at most dt_max that land exactly on t_final.
TimeGrid make_time_grid(double t_final, double dt_max);

/// Writes the forcing F(t) projected onto the nodes into `out` (overwrites).
using SourceFn = std::function<void(double t, std::span<double> out)>;

/// How the time-dependent source (Dirichlet lift plus forcing) enters the stages.
enum class SourceMode {
  /// Evaluate at t_n + c_i dt.
  stage_times,
  /// Use sum_k (A^k 1)_i dt^k s^(k)(t_n), the stage values of the same
  /// method applied to the source written as an autonomous system. The time
  /// derivatives come from a degree-7 interpolant on Chebyshev points.
  /// This removes the order reduction caused by stiff boundary terms.
  rk_consistent,
};

struct IntegrateOptions {
  const RKScheme* scheme = nullptr;  ///< defaults to butcher6()
  SourceMode source = SourceMode::stage_times;
  bool allow_unstable = false;
  /// Approximate time span covered by one source interpolant (rk_consistent).
  double source_window = 5e-3;
};

/// Advances v' = Q v + b(t) + F(t) from `initial` to t_final with `dt`
/// rounded down so the final step lands exactly on t_final.
/// Throws StabilityRefusal if dt exceeds the stable bound (unless allowed)
/// and DivergenceError on non-finite values.
Field integrate(const SpatialOperator& op, const Field& initial, const SourceFn& forcing, double t_final,
                double dt, const IntegrateOptions& options = {});

/// Generic right-hand side y' = f(t, y) for small systems and scalar tests.
using OdeRhs = std::function<void(double t, const Eigen::VectorXd& y, Eigen::VectorXd& dy)>;

Eigen::VectorXd integrate_ode(const RKScheme& scheme, const OdeRhs& rhs, Eigen::VectorXd y, double t0,
                              double t1, long steps);

}  // namespace eisbfd
