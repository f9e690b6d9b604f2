#include "eisbfd/manufactured.hpp"

#include <cmath>
#include <numbers>

#include "eisbfd/error.hpp"

namespace eisbfd {

std::array<double, 5> expcos_jet(double p) {
  // Taylor coefficients of cos about p, then of exp(cos) via n g_n = sum_j j f_j g_{n-j}.
  const double cs = std::cos(p), sn = std::sin(p);
  const std::array<double, 5> f{cs, -sn, -cs / 2, sn / 6, cs / 24};
  std::array<double, 5> g{};
  g[0] = std::exp(cs);
  for (int n = 1; n < 5; ++n) {
    double acc = 0;
    for (int j = 1; j <= n; ++j) acc += j * f[static_cast<std::size_t>(j)] * g[static_cast<std::size_t>(n - j)];
    g[static_cast<std::size_t>(n)] = acc / n;
  }
  double factorial = 1;
  for (int n = 1; n < 5; ++n) {
    factorial *= n;
    g[static_cast<std::size_t>(n)] *= factorial;
  }
  return g;
}

TestCase make_expcos_case(std::string name, int dim, BoundaryMode mode, double k, double length, double t_final,
                          std::vector<int> resolutions) {
  if (dim < 1 || dim > 3) throw DimensionError("dimension must be 1, 2 or 3");
  TestCase tc;
  tc.name = std::move(name);
  tc.description = "exp(cos(k(sum x - t))) with k = " + std::to_string(k);
  tc.dim = dim;
  tc.mode = mode;
  tc.length = length;
  tc.t_final = t_final;
  tc.resolutions = std::move(resolutions);

  auto phase = [k, dim](const Point& x, double t) {
    double s = -t;
    for (int i = 0; i < dim; ++i) s += x[static_cast<std::size_t>(i)];
    return k * s;
  };
  const double d = dim;
  tc.u = [phase](const Point& x, double t) { return std::exp(std::cos(phase(x, t))); };
  tc.u_t = [phase, k](const Point& x, double t) { return -k * expcos_jet(phase(x, t))[1]; };
  tc.laplacian = [phase, k, d](const Point& x, double t) { return d * k * k * expcos_jet(phase(x, t))[2]; };
  tc.forcing = [phase, k, d](const Point& x, double t) {
    const auto j = expcos_jet(phase(x, t));
    return -k * j[1] - d * k * k * j[2];
  };

  if (mode == BoundaryMode::dirichlet) {
    tc.boundary = [k, d, dim, length]() {
      BoundaryData data;
      for (int face = 0; face < 2 * std::min(dim, 2); ++face) {
        // Along a face the phase is k(x_n + s - t), x_n the face position.
        const double xn = (face % 2 == 0) ? 0.0 : length;
        const double tangential = dim >= 2 ? 1.0 : 0.0;
        auto p = [k, xn, tangential](double s, double t) { return k * (xn + tangential * s - t); };
        FaceTraces& tr = data.faces[static_cast<std::size_t>(face)];
        tr.g = [p](double s, double t) { return expcos_jet(p(s, t))[0]; };
        tr.g_t = [p, k](double s, double t) { return -k * expcos_jet(p(s, t))[1]; };
        tr.g_tt = [p, k](double s, double t) { return k * k * expcos_jet(p(s, t))[2]; };
        tr.f = [p, k, d](double s, double t) {
          const auto j = expcos_jet(p(s, t));
          return -k * j[1] - d * k * k * j[2];
        };
        tr.f_t = [p, k, d](double s, double t) {
          const auto j = expcos_jet(p(s, t));
          return k * k * j[2] + d * k * k * k * j[3];
        };
        auto f_second = [p, k, d](double s, double t) {
          const auto j = expcos_jet(p(s, t));
          return -k * k * k * j[3] - d * k * k * k * k * j[4];
        };
        tr.f_nn = f_second;
        if (dim == 2) {
          tr.f_ss = f_second;
          tr.u_ss = [p, k](double s, double t) { return k * k * expcos_jet(p(s, t))[2]; };
          tr.u_tss = [p, k](double s, double t) { return -k * k * k * expcos_jet(p(s, t))[3]; };
          tr.u_ssss = [p, k](double s, double t) { return k * k * k * k * expcos_jet(p(s, t))[4]; };
        }
      }
      return data;
    };
  }
  return tc;
}

TestCase make_mode_case(std::string name, int mode_index, double length, double t_final,
                        std::vector<int> resolutions) {
  TestCase tc;
  tc.name = std::move(name);
  tc.description = "exp(-k^2 t) sin(k x), mode " + std::to_string(mode_index);
  tc.dim = 1;
  tc.mode = BoundaryMode::periodic;
  tc.length = length;
  tc.t_final = t_final;
  tc.resolutions = std::move(resolutions);
  const double k = 2 * std::numbers::pi * mode_index / length;
  tc.u = [k](const Point& x, double t) { return std::exp(-k * k * t) * std::sin(k * x[0]); };
  tc.u_t = [k](const Point& x, double t) { return -k * k * std::exp(-k * k * t) * std::sin(k * x[0]); };
  tc.laplacian = tc.u_t;
  return tc;
}

TestCase make_constant_case(std::string name, int dim, BoundaryMode mode, double value, double length,
                            double t_final, std::vector<int> resolutions) {
  TestCase tc;
  tc.name = std::move(name);
  tc.description = "constant " + std::to_string(value);
  tc.dim = dim;
  tc.mode = mode;
  tc.length = length;
  tc.t_final = t_final;
  tc.resolutions = std::move(resolutions);
  tc.u = [value](const Point&, double) { return value; };
  tc.u_t = [](const Point&, double) { return 0.0; };
  tc.laplacian = tc.u_t;
  if (mode == BoundaryMode::dirichlet) {
    tc.boundary = [value, dim]() {
      BoundaryData data;
      auto zero = [](double, double) { return 0.0; };
      for (int face = 0; face < 2 * std::min(dim, 2); ++face) {
        FaceTraces& tr = data.faces[static_cast<std::size_t>(face)];
        tr.g = [value](double, double) { return value; };
        tr.g_t = tr.g_tt = tr.f = tr.f_t = tr.f_nn = zero;
        if (dim == 2) tr.f_ss = tr.u_ss = tr.u_tss = tr.u_ssss = zero;
      }
      return data;
    };
  }
  return tc;
}

TestCase make_steady_polynomial_case(std::string name, std::vector<double> a, double length,
                                     std::vector<int> resolutions) {
  TestCase tc;
  tc.name = std::move(name);
  tc.description = "steady polynomial";
  tc.dim = 1;
  tc.mode = BoundaryMode::dirichlet;
  tc.length = length;
  tc.t_final = 0.0;
  tc.resolutions = std::move(resolutions);
  // value of the m-th derivative of the polynomial at x
  auto deriv = [a](int m, double x) {
    double acc = 0;
    for (std::size_t k = a.size(); k-- > static_cast<std::size_t>(m);) {
      double coef = a[k];
      for (int r = 0; r < m; ++r) coef *= static_cast<double>(k) - r;
      acc = acc * x + coef;
    }
    return acc;
  };
  tc.u = [deriv](const Point& x, double) { return deriv(0, x[0]); };
  tc.u_t = [](const Point&, double) { return 0.0; };
  tc.laplacian = [deriv](const Point& x, double) { return deriv(2, x[0]); };
  tc.forcing = [deriv](const Point& x, double) { return -deriv(2, x[0]); };
  tc.boundary = [deriv, length]() {
    BoundaryData data;
    auto zero = [](double, double) { return 0.0; };
    for (int face = 0; face < 2; ++face) {
      const double x = face == 0 ? 0.0 : length;
      FaceTraces& tr = data.faces[static_cast<std::size_t>(face)];
      tr.g = [deriv, x](double, double) { return deriv(0, x); };
      tr.g_t = tr.g_tt = tr.f_t = zero;
      tr.f = [deriv, x](double, double) { return -deriv(2, x); };
      tr.f_nn = [deriv, x](double, double) { return -deriv(4, x); };
    }
    return data;
  };
  return tc;
}

std::vector<double> sample(const BlockGrid& grid, const ScalarField& f, double t) {
  std::vector<double> out(grid.node_count());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(grid.coordinates(i), t);
  return out;
}

}  // namespace eisbfd
