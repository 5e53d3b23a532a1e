#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>
#include <vector>

#include "flowmap/signal.hpp"

namespace flowmap::input {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using signal::InputSignal;

enum class BasisKind { Taylor, LagrangeEquispaced, LegendreL2 };

struct BasisSpec {
  BasisKind kind = BasisKind::LagrangeEquispaced;
  int degree = 2;

  int n_b() const { return degree + 1; }
};

std::string to_string(BasisKind kind);
BasisKind basis_kind_from_string(const std::string& name);

// Coefficients for one interval [t_n, t_n + delta]; row c holds the
// parameter vector of input channel c.
struct LocalInputParams {
  Mat coeffs;  // input_arity x n_b
  double delta = 0.0;
  BasisSpec basis;
};

// Piecewise-defined parameterized input over a time grid. Interior
// breakpoints resolve to the right segment; the last interval is closed.
struct PiecewiseInput {
  std::vector<double> breakpoints;
  std::vector<LocalInputParams> segments;
};

struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Legendre polynomial p_j on [-1, 1] via the three-term recurrence.
double legendre(int j, double x);

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, Vec& nodes, Vec& weights);

LocalInputParams fit_taylor(const InputSignal& sig, double t_n, double delta,
                            int k);
LocalInputParams fit_interp(const InputSignal& sig, double t_n, double delta,
                            int k);
LocalInputParams fit_l2(const InputSignal& sig, double t_n, double delta,
                        int k, int quad_order);

// Dispatch on basis kind; L2 uses quad_order = k + 3.
LocalInputParams fit_local(const InputSignal& sig, double t_n, double delta,
                           const BasisSpec& basis);

Vec eval_local(const LocalInputParams& params, double tau);

PiecewiseInput fit_piecewise(const InputSignal& sig,
                             const std::vector<double>& grid,
                             const BasisSpec& basis);

Vec eval_global(const PiecewiseInput& pw, double t);

// Dense-grid lower bound on sup_t |gamma(t) - gamma_tilde(t)| (max over
// channels).
double sup_error(const InputSignal& sig, const PiecewiseInput& pw,
                 int samples_per_segment);

}  // namespace flowmap::input
