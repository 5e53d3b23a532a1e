#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "flowmap/dataset.hpp"

namespace flowmap {

// Shape of a one-step model's input vector and the basis its gamma block
// was fitted with.
struct ModelLayout {
  int d = 0;
  int input_arity = 0;
  int n_b = 0;
  int n_extra = 0;
  bool include_delta = true;
  input::BasisSpec basis;
  std::string system;

  int input_dim() const {
    return d + input_arity * n_b + n_extra + (include_delta ? 1 : 0);
  }
};

ModelLayout layout_of(const data::TrainingSet& set);

namespace net {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Feed-forward network with tanh hidden layers and a linear output layer.
// Biases are augmented into the weight matrices (last column). The input is
// affinely normalized before the first layer; identity by default.
struct NetParams {
  std::vector<int> layer_sizes;  // m, h_1..h_L, d
  std::vector<Mat> weights;      // weights[l]: layer_sizes[l+1] x (layer_sizes[l]+1)
  Vec in_shift, in_scale;        // x_hat = (x - shift) .* scale

  int input_dim() const { return layer_sizes.front(); }
  int output_dim() const { return layer_sizes.back(); }
};

struct ForwardCache {
  std::vector<Mat> activations;  // activations[0] = normalized input
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

NetParams init_params(const std::vector<int>& layer_sizes, std::uint64_t seed);

// Columns are samples.
Mat fnn_forward(const NetParams& params, const Mat& y_in,
                ForwardCache* cache = nullptr);
Vec fnn_forward(const NetParams& params, const Vec& y_in);

// Residual map: X_out = state slice of X_in + N(X_in).
Mat model_forward(const NetParams& params, const Mat& X_in);
Vec model_forward(const NetParams& params, const Vec& X_in);

// Gradients of 0.5 * ||residual||_F^2 w.r.t. every weight matrix; the
// identity path contributes nothing.
std::vector<Mat> model_backward(const NetParams& params,
                                const ForwardCache& cache,
                                const Mat& residual);

// Checkpoint = parameters + dataset metadata needed to rebuild the input
// vector at prediction time.
struct NetworkModel {
  NetParams params;
  ModelLayout layout;
  Vec box_lo, box_hi;  // training-domain box of assembled inputs
};

void save_checkpoint(const NetworkModel& model, const std::string& path);
NetworkModel load_checkpoint(const std::string& path);

}  // namespace net
}  // namespace flowmap
