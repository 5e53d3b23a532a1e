#include "flowmap/input_param.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace flowmap::input {

std::string to_string(BasisKind kind) {
  switch (kind) {
    case BasisKind::Taylor:
      return "taylor";
    case BasisKind::LagrangeEquispaced:
      return "lagrange";
    case BasisKind::LegendreL2:
      return "legendre";
  }
  return "?";
}

BasisKind basis_kind_from_string(const std::string& name) {
  if (name == "taylor") return BasisKind::Taylor;
  if (name == "lagrange") return BasisKind::LagrangeEquispaced;
  if (name == "legendre") return BasisKind::LegendreL2;
  throw std::invalid_argument("unknown basis kind '" + name +
                              "' (expected taylor|lagrange|legendre)");
}

double legendre(int j, double x) {
  if (j < 0) throw std::invalid_argument("legendre: index must be >= 0");
  if (j == 0) return 1.0;
  double pm = 1.0;  // p_0
  double p = x;     // p_1
  for (int i = 1; i < j; ++i) {
    const double pn = ((2 * i + 1) * x * p - i * pm) / (i + 1);
    pm = p;
    p = pn;
  }
  return p;
}

namespace {

double legendre_deriv(int n, double x) {
  // p'_n = n (x p_n - p_{n-1}) / (x^2 - 1)
  return n * (x * legendre(n, x) - legendre(n - 1, x)) / (x * x - 1.0);
}

// 4th-order central difference for the first derivative.
double central_diff(const std::function<double(double)>& f, double t,
                    double h) {
  return (f(t - 2 * h) - 8.0 * f(t - h) + 8.0 * f(t + h) - f(t + 2 * h)) /
         (12.0 * h);
}

double fd_derivative(const std::function<double(double)>& f, double t,
                     int order, double h) {
  if (order == 0) return f(t);
  return central_diff(
      [&](double s) { return fd_derivative(f, s, order - 1, h); }, t, h);
}

}  // namespace

void gauss_legendre(int n, Vec& nodes, Vec& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  nodes.resize(n);
  weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const double dx = legendre(n, x) / legendre_deriv(n, x);
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double dp = legendre_deriv(n, x);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = -x;
    weights[i] = w;
    nodes[n - 1 - i] = x;
    weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) {
    nodes[n / 2] = 0.0;
    const double dp = legendre_deriv(n, 0.0);
    weights[n / 2] = 2.0 / (dp * dp);
  }
}

LocalInputParams fit_taylor(const InputSignal& sig, double t_n, double delta,
                            int k) {
  if (delta <= 0.0) throw std::invalid_argument("fit_taylor: delta must be > 0");
  if (k < 0) throw std::invalid_argument("fit_taylor: degree must be >= 0");
  const int arity = sig.arity();
  LocalInputParams out;
  out.delta = delta;
  out.basis = {BasisKind::Taylor, k};
  out.coeffs.resize(arity, k + 1);
  const double h = delta / 10.0;
  for (int c = 0; c < arity; ++c) {
    const auto& ch = sig.channels[c];
    double factorial = 1.0;
    for (int j = 0; j <= k; ++j) {
      if (j > 1) factorial *= j;
      double dj;
      if (j == 0) {
        dj = ch.value(t_n);
      } else if (ch.derivative) {
        dj = ch.derivative(t_n, j);
      } else {
        dj = fd_derivative(ch.value, t_n, j, h);
      }
      if (!std::isfinite(dj)) {
        std::ostringstream os;
        os << "fit_taylor: non-finite derivative of order " << j
           << " for channel " << c << " at t=" << t_n;
        throw FitError(os.str());
      }
      out.coeffs(c, j) = dj / factorial;
    }
  }
  return out;
}

LocalInputParams fit_interp(const InputSignal& sig, double t_n, double delta,
                            int k) {
  if (delta <= 0.0) throw std::invalid_argument("fit_interp: delta must be > 0");
  if (k < 0) throw std::invalid_argument("fit_interp: degree must be >= 0");
  const int arity = sig.arity();
  LocalInputParams out;
  out.delta = delta;
  out.basis = {BasisKind::LagrangeEquispaced, k};
  out.coeffs.resize(arity, k + 1);
  for (int c = 0; c < arity; ++c) {
    for (int j = 0; j <= k; ++j) {
      const double t = (k == 0) ? t_n : t_n + j * delta / k;
      out.coeffs(c, j) = sig.channels[c].value(t);
    }
  }
  return out;
}

LocalInputParams fit_l2(const InputSignal& sig, double t_n, double delta,
                        int k, int quad_order) {
  if (delta <= 0.0) throw std::invalid_argument("fit_l2: delta must be > 0");
  if (k < 0) throw std::invalid_argument("fit_l2: degree must be >= 0");
  if (quad_order < k + 1)
    throw std::invalid_argument("fit_l2: quad_order must be >= degree + 1");
  Vec nodes, weights;
  gauss_legendre(quad_order, nodes, weights);
  const int arity = sig.arity();
  LocalInputParams out;
  out.delta = delta;
  out.basis = {BasisKind::LegendreL2, k};
  out.coeffs.setZero(arity, k + 1);
  for (int c = 0; c < arity; ++c) {
    for (int q = 0; q < quad_order; ++q) {
      const double s = nodes[q];
      const double g = sig.channels[c].value(t_n + 0.5 * delta * (s + 1.0));
      for (int j = 0; j <= k; ++j) {
        out.coeffs(c, j) += weights[q] *
                            std::sqrt((2 * j + 1) * delta / 4.0) * g *
                            legendre(j, s);
      }
    }
  }
  return out;
}

LocalInputParams fit_local(const InputSignal& sig, double t_n, double delta,
                           const BasisSpec& basis) {
  switch (basis.kind) {
    case BasisKind::Taylor:
      return fit_taylor(sig, t_n, delta, basis.degree);
    case BasisKind::LagrangeEquispaced:
      return fit_interp(sig, t_n, delta, basis.degree);
    case BasisKind::LegendreL2:
      return fit_l2(sig, t_n, delta, basis.degree, basis.degree + 3);
  }
  throw std::logic_error("fit_local: bad basis kind");
}

Vec eval_local(const LocalInputParams& params, double tau) {
  const double tol = 1e-12;
  if (tau < -tol || tau > params.delta + tol) {
    std::ostringstream os;
    os << "eval_local: tau=" << tau << " outside [0, " << params.delta << "]";
    throw std::domain_error(os.str());
  }
  tau = std::clamp(tau, 0.0, params.delta);
  const int arity = static_cast<int>(params.coeffs.rows());
  const int k = params.basis.degree;
  Vec v(arity);
  switch (params.basis.kind) {
    case BasisKind::Taylor: {
      for (int c = 0; c < arity; ++c) {
        double acc = 0.0;
        for (int j = k; j >= 0; --j) acc = acc * tau + params.coeffs(c, j);
        v[c] = acc;
      }
      break;
    }
    case BasisKind::LagrangeEquispaced: {
      if (k == 0) {
        for (int c = 0; c < arity; ++c) v[c] = params.coeffs(c, 0);
        break;
      }
      Vec basis_vals(k + 1);
      for (int j = 0; j <= k; ++j) {
        double l = 1.0;
        for (int i = 0; i <= k; ++i) {
          if (i == j) continue;
          l *= (k * tau - i * params.delta) / ((j - i) * params.delta);
        }
        basis_vals[j] = l;
      }
      for (int c = 0; c < arity; ++c)
        v[c] = params.coeffs.row(c) * basis_vals;
      break;
    }
    case BasisKind::LegendreL2: {
      const double x = 2.0 * tau / params.delta - 1.0;
      for (int c = 0; c < arity; ++c) {
        double acc = 0.0;
        for (int j = 0; j <= k; ++j) {
          acc += params.coeffs(c, j) *
                 std::sqrt((2 * j + 1) / params.delta) * legendre(j, x);
        }
        v[c] = acc;
      }
      break;
    }
  }
  return v;
}

PiecewiseInput fit_piecewise(const InputSignal& sig,
                             const std::vector<double>& grid,
                             const BasisSpec& basis) {
  if (grid.size() < 2)
    throw std::invalid_argument("fit_piecewise: grid needs >= 2 points");
  PiecewiseInput pw;
  pw.breakpoints = grid;
  pw.segments.reserve(grid.size() - 1);
  for (std::size_t n = 0; n + 1 < grid.size(); ++n) {
    const double delta = grid[n + 1] - grid[n];
    if (delta <= 0.0)
      throw std::invalid_argument("fit_piecewise: grid must be increasing");
    pw.segments.push_back(fit_local(sig, grid[n], delta, basis));
  }
  return pw;
}

Vec eval_global(const PiecewiseInput& pw, double t) {
  const double t0 = pw.breakpoints.front();
  const double tN = pw.breakpoints.back();
  const double tol = 1e-12 * std::max({1.0, std::abs(t0), std::abs(tN)});
  if (t < t0 - tol || t > tN + tol) {
    std::ostringstream os;
    os << "eval_global: t=" << t << " outside [" << t0 << ", " << tN << "]";
    throw std::domain_error(os.str());
  }
  t = std::clamp(t, t0, tN);
  // Half-open segments [t_n, t_{n+1}); the last one is closed.
  auto it = std::upper_bound(pw.breakpoints.begin(), pw.breakpoints.end(), t);
  std::size_t n = static_cast<std::size_t>(it - pw.breakpoints.begin());
  n = (n == 0) ? 0 : n - 1;
  if (n >= pw.segments.size()) n = pw.segments.size() - 1;
  return eval_local(pw.segments[n], t - pw.breakpoints[n]);
}

double sup_error(const InputSignal& sig, const PiecewiseInput& pw,
                 int samples_per_segment) {
  if (samples_per_segment < 2)
    throw std::invalid_argument("sup_error: need >= 2 samples per segment");
  double worst = 0.0;
  for (std::size_t n = 0; n < pw.segments.size(); ++n) {
    const double t_n = pw.breakpoints[n];
    const double delta = pw.segments[n].delta;
    for (int i = 0; i < samples_per_segment; ++i) {
      const double tau = delta * i / (samples_per_segment - 1);
      const Vec approx = eval_local(pw.segments[n], tau);
      const Vec exact = sig(t_n + tau);
      worst = std::max(worst, (approx - exact).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

}  // namespace flowmap::input
