#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace flowmap::dynamics {

using Vec = Eigen::VectorXd;

struct Lipschitz {
  double L1 = 0.0;  // w.r.t. state
  double L2 = 0.0;  // w.r.t. input
};

// Right-hand side f(x, gamma) of a non-autonomous system, with the
// time-dependence routed through the input values gamma(t).
struct SystemSpec {
  std::string name;
  int d = 0;
  int input_arity = 0;
  std::function<Vec(const Vec&, const Vec&)> rhs;
  std::optional<Lipschitz> lipschitz;
  // Explicit-scheme step limit (set for stiff semidiscrete systems).
  std::optional<double> max_step;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> states;
};

struct HeatConfig {
  int n_grid = 22;  // includes the 2 boundary points
  double mu = 1.0;
  double sigma = 0.5;
};

// Time signal feeding the integrator: t -> input values (length input_arity).
using TimeSignal = std::function<Vec(double)>;

struct ContractViolation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NumericOverflow : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Vec eval_rhs(const SystemSpec& system, const Vec& x, const Vec& gamma_values);

Vec rk4_step(const SystemSpec& system, const Vec& x, double t, double h,
             const TimeSignal& signal);

Trajectory integrate(const SystemSpec& system, const Vec& x0, double t0,
                     double t1, int n_steps, const TimeSignal& signal);

SystemSpec make_heat_system(const HeatConfig& cfg);

// Benchmark presets. linear_scalar: dx = -a(t) x + b(t), inputs (a, b).
// predator_prey: Lotka-Volterra with additive control u(t) on prey.
// forced_oscillator: x1' = x2, x2' = -nu(t) x1 - k x2 + f(t), inputs (nu, f).
// heat22: 22-point semidiscrete heat equation, d = 20, input alpha(t).
SystemSpec linear_scalar();
SystemSpec predator_prey();
SystemSpec forced_oscillator(double damping = 0.5);
SystemSpec heat22(double mu = 1.0, double sigma = 0.5);

SystemSpec preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace flowmap::dynamics
