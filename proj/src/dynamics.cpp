#include "flowmap/dynamics.hpp"

#include <cmath>
#include <sstream>

namespace flowmap::dynamics {

Vec eval_rhs(const SystemSpec& system, const Vec& x, const Vec& gamma_values) {
  if (x.size() != system.d) {
    std::ostringstream os;
    os << "eval_rhs: state has length " << x.size() << ", expected "
       << system.d;
    throw ContractViolation(os.str());
  }
  if (gamma_values.size() != system.input_arity) {
    std::ostringstream os;
    os << "eval_rhs: gamma_values has length " << gamma_values.size()
       << ", expected " << system.input_arity;
    throw ContractViolation(os.str());
  }
  return system.rhs(x, gamma_values);
}

Vec rk4_step(const SystemSpec& system, const Vec& x, double t, double h,
             const TimeSignal& signal) {
  if (h <= 0.0) throw ContractViolation("rk4_step: step size must be > 0");
  if (system.max_step && h > *system.max_step) {
    std::ostringstream os;
    os << "rk4_step: step " << h << " exceeds stability limit "
       << *system.max_step << " of system '" << system.name << "'";
    throw ContractViolation(os.str());
  }
  const Vec k1 = eval_rhs(system, x, signal(t));
  const Vec k2 = eval_rhs(system, x + 0.5 * h * k1, signal(t + 0.5 * h));
  const Vec k3 = eval_rhs(system, x + 0.5 * h * k2, signal(t + 0.5 * h));
  const Vec k4 = eval_rhs(system, x + h * k3, signal(t + h));
  Vec out = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!out.allFinite()) {
    std::ostringstream os;
    os << "rk4_step: non-finite state at t=" << t << " from x=["
       << x.transpose() << "]";
    throw NumericOverflow(os.str());
  }
  return out;
}

Trajectory integrate(const SystemSpec& system, const Vec& x0, double t0,
                     double t1, int n_steps, const TimeSignal& signal) {
  if (t1 <= t0) throw ContractViolation("integrate: t1 must be > t0");
  if (n_steps < 1) throw ContractViolation("integrate: n_steps must be >= 1");
  const double h = (t1 - t0) / n_steps;
  Trajectory traj;
  traj.times.reserve(n_steps + 1);
  traj.states.reserve(n_steps + 1);
  traj.times.push_back(t0);
  traj.states.push_back(x0);
  Vec x = x0;
  for (int i = 0; i < n_steps; ++i) {
    const double t = t0 + i * h;
    try {
      x = rk4_step(system, x, t, h, signal);
    } catch (const NumericOverflow& e) {
      std::ostringstream os;
      os << "integrate: step " << i << ": " << e.what();
      throw NumericOverflow(os.str());
    }
    traj.times.push_back(t0 + (i + 1) * h);
    traj.states.push_back(x);
  }
  return traj;
}

SystemSpec make_heat_system(const HeatConfig& cfg) {
  if (cfg.n_grid < 3)
    throw ContractViolation("make_heat_system: n_grid must be >= 3");
  if (cfg.sigma <= 0.0)
    throw ContractViolation("make_heat_system: sigma must be > 0");
  const int d = cfg.n_grid - 2;
  const double h = 1.0 / (cfg.n_grid - 1);
  Vec source(d);
  for (int j = 0; j < d; ++j) {
    const double xj = (j + 1) * h;
    const double r = (xj - cfg.mu) / cfg.sigma;
    source[j] = std::exp(-r * r);
  }
  SystemSpec sys;
  sys.name = "heat";
  sys.d = d;
  sys.input_arity = 1;
  sys.max_step = 0.4 * h * h;
  const double inv_h2 = 1.0 / (h * h);
  sys.rhs = [d, inv_h2, source](const Vec& u, const Vec& gamma) {
    Vec du(d);
    for (int j = 0; j < d; ++j) {
      const double left = (j > 0) ? u[j - 1] : 0.0;
      const double right = (j < d - 1) ? u[j + 1] : 0.0;
      du[j] = inv_h2 * (left - 2.0 * u[j] + right) + gamma[0] * source[j];
    }
    return du;
  };
  return sys;
}

SystemSpec linear_scalar() {
  SystemSpec sys;
  sys.name = "linear_scalar";
  sys.d = 1;
  sys.input_arity = 2;
  sys.rhs = [](const Vec& x, const Vec& g) {
    Vec dx(1);
    dx[0] = -g[0] * x[0] + g[1];
    return dx;
  };
  return sys;
}

SystemSpec predator_prey() {
  SystemSpec sys;
  sys.name = "predator_prey";
  sys.d = 2;
  sys.input_arity = 1;
  sys.rhs = [](const Vec& x, const Vec& g) {
    Vec dx(2);
    dx[0] = x[0] - x[0] * x[1] + g[0];
    dx[1] = -x[1] + x[0] * x[1];
    return dx;
  };
  return sys;
}

SystemSpec forced_oscillator(double damping) {
  SystemSpec sys;
  sys.name = "forced_oscillator";
  sys.d = 2;
  sys.input_arity = 2;
  sys.rhs = [damping](const Vec& x, const Vec& g) {
    Vec dx(2);
    dx[0] = x[1];
    dx[1] = -g[0] * x[0] - damping * x[1] + g[1];
    return dx;
  };
  return sys;
}

SystemSpec heat22(double mu, double sigma) {
  HeatConfig cfg;
  cfg.n_grid = 22;
  cfg.mu = mu;
  cfg.sigma = sigma;
  SystemSpec sys = make_heat_system(cfg);
  sys.name = "heat22";
  return sys;
}

SystemSpec preset(const std::string& name) {
  if (name == "linear_scalar") return linear_scalar();
  if (name == "predator_prey") return predator_prey();
  if (name == "forced_oscillator") return forced_oscillator();
  if (name == "heat22") return heat22();
  std::ostringstream os;
  os << "unknown preset '" << name << "'; valid presets:";
  for (const auto& p : preset_names()) os << " " << p;
  throw ContractViolation(os.str());
}

std::vector<std::string> preset_names() {
  return {"linear_scalar", "predator_prey", "forced_oscillator", "heat22"};
}

}  // namespace flowmap::dynamics
