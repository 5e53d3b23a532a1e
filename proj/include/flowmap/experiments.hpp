#pragma once

#include <string>
#include <vector>

#include "flowmap/rollout.hpp"
#include "flowmap/trainer.hpp"

namespace flowmap::experiments {

using Vec = Eigen::VectorXd;

// One leg of a staged training run (warm restart at a new learning rate).
struct TrainStage {
  int epochs;
  double learning_rate;
};

// Full configuration of one benchmark run: sampling domains, model size,
// training setup, and the prediction scenario.
struct Experiment {
  std::string id;
  std::string preset;
  input::BasisSpec basis;
  data::SamplingDomains domains;
  int J = 20000;
  int micro_steps = 10;
  bool include_delta = true;
  std::vector<int> hidden = {80, 80, 80};
  int poly_degree = 2;  // used by polynomial runs
  train::TrainConfig tcfg;
  // When non-empty, training runs these stages in order, carrying the
  // parameters over; each stage inherits tcfg except epochs/learning rate.
  std::vector<TrainStage> stages;
  Vec x0;
  signal::InputSignal sig;
  Vec extra;
  double T = 100.0;
  double delta = 0.1;
  int reference_micro = 50;  // reference sub-steps per prediction interval
};

// ids: ex1, ex1_poly, ex2, ex3, ex4
Experiment experiment(const std::string& id);
std::vector<std::string> experiment_ids();

// Runs the experiment's training stages (or the single tcfg run when no
// stages are given) and returns the last report with the concatenated loss
// histories. `seed` overrides tcfg.seed for every stage.
train::TrainReport train_network(net::NetParams params,
                                 const data::TrainingSet& set,
                                 const Experiment& e, std::uint64_t seed);

// Factory mapping the sampled extra constants to a concrete system
// (heat22 rebuilds its source from (mu, sigma); other presets ignore extra).
data::SystemFactory system_factory(const std::string& preset);

// Reference solution on the prediction grid: segment-wise RK4 under the true
// signal, sub-step count auto-raised to any explicit stability limit.
dynamics::Trajectory reference_trajectory(const data::SystemFactory& factory,
                                          const Vec& extra, const Vec& x0,
                                          const signal::InputSignal& sig,
                                          const std::vector<double>& grid,
                                          int micro_per_segment);

}  // namespace flowmap::experiments
