#include "flowmap/experiments.hpp"

#include <cmath>
#include <sstream>

namespace flowmap::experiments {

namespace {

using data::Interval;

std::vector<Interval> repeat(Interval iv, int n) {
  return std::vector<Interval>(n, iv);
}

std::vector<std::vector<Interval>> gamma_box(Interval iv, int arity, int n_b) {
  return std::vector<std::vector<Interval>>(arity, repeat(iv, n_b));
}

}  // namespace

train::TrainReport train_network(net::NetParams params,
                                 const data::TrainingSet& set,
                                 const Experiment& e, std::uint64_t seed) {
  std::vector<TrainStage> stages = e.stages;
  if (stages.empty())
    stages.push_back({e.tcfg.epochs, e.tcfg.learning_rate});
  train::TrainReport report;
  for (const TrainStage& st : stages) {
    train::TrainConfig tcfg = e.tcfg;
    tcfg.epochs = st.epochs;
    tcfg.learning_rate = st.learning_rate;
    tcfg.seed = seed;
    train::TrainReport r = train::train(std::move(params), set, tcfg);
    params = r.final_params;
    report.loss_history.insert(report.loss_history.end(),
                               r.loss_history.begin(), r.loss_history.end());
    report.val_history.insert(report.val_history.end(), r.val_history.begin(),
                              r.val_history.end());
    report.final_params = std::move(r.final_params);
  }
  return report;
}

data::SystemFactory system_factory(const std::string& preset) {
  if (preset == "heat22") {
    return [](const Vec& extra) {
      if (extra.size() == 2) return dynamics::heat22(extra[0], extra[1]);
      return dynamics::heat22();
    };
  }
  dynamics::SystemSpec sys = dynamics::preset(preset);
  return [sys](const Vec&) { return sys; };
}

Experiment experiment(const std::string& id) {
  Experiment e;
  e.id = id;
  e.basis = {input::BasisKind::LagrangeEquispaced, 2};
  e.domains.delta = {0.05, 0.15};
  e.tcfg.epochs = 500;
  e.tcfg.batch_size = 256;
  e.tcfg.learning_rate = 1e-3;
  e.tcfg.seed = 2024;

  if (id == "ex1" || id == "ex1_poly") {
    e.preset = "linear_scalar";
    e.domains.x = repeat({-2.0, 2.0}, 1);
    e.domains.gamma = gamma_box({-5.0, 5.0}, 2, 3);
    e.x0 = Vec::Constant(1, 2.0);
    e.sig.channels = {signal::sinusoid(1.0, 4.0, 0.0, 1.0),
                      signal::chirp_cos(1000.0)};
    if (id == "ex1_poly") {
      e.sig.channels = {signal::sinusoid(1.0, 0.1, 0.0, 1.0),
                        signal::cosine(1.0, 1.0)};
      e.poly_degree = 2;
    }
    e.extra.resize(0);
    return e;
  }
  if (id == "ex2") {
    e.preset = "predator_prey";
    e.domains.x = repeat({0.0, 5.0}, 2);
    e.domains.gamma = gamma_box({0.0, 5.0}, 1, 3);
    // long-horizon rollout (1000 steps) needs a much lower one-step error
    // than the default single run reaches; warm restarts at decreasing
    // learning rates get the validation MSE from ~1.5e-5 down to ~3e-7
    e.stages = {{500, 1e-3}, {500, 3e-4}, {500, 1e-4}};
    e.x0 = Vec(2);
    e.x0 << 1.0, 2.0;
    e.sig.channels = {signal::sum(signal::sinusoid(1.0, 1.0 / 3.0, 0.0, 2.0),
                                  signal::cosine(1.0, 1.0))};
    e.extra.resize(0);
    return e;
  }
  if (id == "ex3") {
    e.preset = "forced_oscillator";
    e.domains.x = repeat({-3.0, 3.0}, 2);
    e.domains.gamma = gamma_box({-3.0, 3.0}, 2, 3);
    e.x0 = Vec(2);
    e.x0 << 1.0, 0.0;
    e.sig.channels = {signal::cosine(1.0, 1.0), signal::linear(1.0 / 50.0)};
    e.extra.resize(0);
    return e;
  }
  if (id == "ex4") {
    e.preset = "heat22";
    e.domains.x = repeat({0.0, 2.0}, 20);
    e.domains.gamma = gamma_box({-2.0, 2.0}, 1, 3);
    e.domains.extra = {{0.0, 3.0}, {0.05, 0.5}};
    e.J = 20000;
    // fixed-step mode: 25 model inputs (the increment map is learned at the
    // prediction step only, which removes a nuisance input dimension)
    e.include_delta = false;
    e.domains.delta = {0.1, 0.1};
    // the quasi-steady forced response (|u| ~ 0.1) is two orders of
    // magnitude below the increments of rough sampled states, so it is the
    // last feature the MSE objective resolves; the long staircase is needed
    // to learn it accurately enough for rollout
    e.stages = {{2000, 1e-3}, {2000, 3e-4}, {2000, 1e-4}};
    e.T = 2.0;
    e.reference_micro = 120;
    e.x0 = Vec(20);
    // amplitude 2 makes the initial profile span the sampled state domain
    // (peak value at the top of I_u = [0,2])
    for (int j = 0; j < 20; ++j)
      e.x0[j] = 2.0 * std::sin(M_PI * (j + 1) / 21.0);
    e.sig.channels = {signal::sawtooth(1.0, 1.0)};
    e.extra = Vec(2);
    e.extra << 1.0, 0.5;
    return e;
  }
  std::ostringstream os;
  os << "unknown experiment '" << id << "'; valid ids:";
  for (const auto& x : experiment_ids()) os << " " << x;
  throw dynamics::ContractViolation(os.str());
}

std::vector<std::string> experiment_ids() {
  return {"ex1", "ex1_poly", "ex2", "ex3", "ex4"};
}

dynamics::Trajectory reference_trajectory(const data::SystemFactory& factory,
                                          const Vec& extra, const Vec& x0,
                                          const signal::InputSignal& sig,
                                          const std::vector<double>& grid,
                                          int micro_per_segment) {
  dynamics::SystemSpec sys = factory(extra);
  dynamics::TimeSignal tsig = [&sig](double t) { return sig(t); };
  dynamics::Trajectory traj;
  traj.times.push_back(grid[0]);
  traj.states.push_back(x0);
  Vec x = x0;
  for (std::size_t n = 0; n + 1 < grid.size(); ++n) {
    const double delta = grid[n + 1] - grid[n];
    int steps = micro_per_segment;
    if (sys.max_step)
      steps = std::max(steps,
                       static_cast<int>(std::ceil(delta / *sys.max_step)));
    x = dynamics::integrate(sys, x, grid[n], grid[n + 1], steps, tsig)
            .states.back();
    traj.times.push_back(grid[n + 1]);
    traj.states.push_back(x);
  }
  return traj;
}

}  // namespace flowmap::experiments
