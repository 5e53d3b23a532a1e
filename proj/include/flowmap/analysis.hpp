#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flowmap/rollout.hpp"

namespace flowmap::analysis {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct BoundInputs {
  double L1 = 0.0;    // state Lipschitz constant of f
  double L2 = 0.0;    // input Lipschitz constant of f
  double eta = 0.0;   // sup gap between input and its parameterization
  double L_phi = 0.0; // Lipschitz constant of the one-step evolution map
  double E = 0.0;     // one-step model sup error
  double delta = 0.0; // uniform step
  int n = 0;          // step count
  double t = 0.0;     // elapsed time
};

// L2 * eta * t * e^{L1 t}
double input_bound(double L1, double L2, double eta, double t);

// (1 - L_phi^n) / (1 - L_phi) * E, with the L_phi = 1 limit n * E.
double rollout_bound(double L_phi, double E, int n);

double combined_bound(const BoundInputs& inputs);

// (e^{n L1 Delta} - 1) / (e^{L1 Delta} - 1) * E, with the L1 = 0 limit n * E.
double appendix_bound(double L1, double Delta, int n, double E);

struct GronwallReport {
  std::vector<double> times;
  std::vector<double> measured;  // |x - x_tilde| at grid times
  std::vector<double> bound;
  double eta = 0.0;
  bool satisfied = false;
};

// Integrates the system under the true input and under its piecewise
// parameterization, then checks the measured gap against input_bound at
// every grid point. The system must carry Lipschitz constants.
GronwallReport check_gronwall(const dynamics::SystemSpec& system,
                              const signal::InputSignal& gamma,
                              const input::BasisSpec& basis, const Vec& x0,
                              double T, double step_delta,
                              int micro_per_segment = 50);

struct RolloutBoundReport {
  std::vector<double> measured;
  std::vector<double> bound;
  double L_phi = 0.0;
  double E = 0.0;
  bool satisfied = false;
};

// Rolls the model twice over the grid, once with per-step injected noise of
// magnitude <= E, and checks the divergence against rollout_bound.
// adversarial=true injects +E in every coordinate at every step.
RolloutBoundReport check_rollout_bound(const roll::OneStepModel& model,
                                       const Vec& x0,
                                       const signal::InputSignal& sig,
                                       const std::vector<double>& grid,
                                       double E, double L_phi,
                                       std::uint64_t seed,
                                       bool adversarial = false,
                                       const Vec& extra = Vec());

// Sampling heuristic: max one-step stretch ratio over random state pairs at
// distance `dist`, inflated by 10%.
double estimate_lphi(const roll::OneStepModel& model,
                     const std::vector<data::Interval>& state_box,
                     const Mat& gamma, double delta, const Vec& extra,
                     int n_pairs = 10000, double dist = 1e-4,
                     std::uint64_t seed = 0);

void write_gronwall_json(const GronwallReport& report, const std::string& path);
void write_rollout_bound_json(const RolloutBoundReport& report,
                              const std::string& path);

}  // namespace flowmap::analysis
