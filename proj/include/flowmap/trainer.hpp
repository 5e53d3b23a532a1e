#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flowmap/flownet.hpp"

namespace flowmap::train {

using net::Mat;
using net::NetParams;
using net::Vec;

struct TrainConfig {
  int epochs = 500;
  int batch_size = 256;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t seed = 0;
  double validation_fraction = 0.1;  // reporting only, no early stopping
};

struct TrainReport {
  std::vector<double> loss_history;  // per-epoch training MSE
  std::vector<double> val_history;   // per-epoch validation MSE (nan if empty)
  NetParams final_params;
};

struct AdamState {
  std::vector<Mat> m, v;
  long step = 0;

  static AdamState like(const NetParams& params);
};

void adam_step(NetParams& params, AdamState& state,
               const std::vector<Mat>& grads, double lr, double beta1,
               double beta2, double eps);

// (1/J) sum_j ||model_forward(X_j) - Y_j||^2 with columns as samples.
double mse_loss(const NetParams& params, const Mat& X, const Mat& Y);
double mse_loss(const NetParams& params, const data::TrainingSet& set);

// Builds the (input, target) matrices of a training set, columns = samples.
void design_matrices(const data::TrainingSet& set, Mat& X, Mat& Y);

// Sets the input normalization of `params` from the set's domain box, then
// runs seeded minibatch Adam epochs.
TrainReport train(NetParams params, const data::TrainingSet& set,
                  const TrainConfig& cfg);

void write_loss_csv(const TrainReport& report, const std::string& path);

}  // namespace flowmap::train
