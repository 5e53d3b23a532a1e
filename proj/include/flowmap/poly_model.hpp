#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "flowmap/flownet.hpp"

namespace flowmap::poly {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Tensor Legendre surrogate on the total-degree index set, fitted to the
// one-step increment; prediction keeps the residual structure.
struct PolyModel {
  ModelLayout layout;
  int degree = 0;
  std::vector<std::vector<int>> index_set;  // lexicographic, |alpha|_1 <= p
  Mat coeffs;                               // n_features x d
  Vec box_lo, box_hi;                       // affine map to [-1, 1]^m

  int input_dim() const { return layout.input_dim(); }
};

struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::vector<int>> total_degree_indices(
    int m, int p, std::size_t cap = 1'000'000);

// Multivariate Legendre features at a model input; sets *out_of_box when the
// input leaves the training box (evaluation proceeds anyway).
Vec features(const Vec& model_input, const PolyModel& model,
             bool* out_of_box = nullptr);

struct FitInfo {
  int n_features = 0;
  Eigen::Index rank = 0;
  bool rank_deficient = false;
  bool underdetermined = false;
  double residual_rms = 0.0;  // RMS of A c - Y over all entries
};

PolyModel fit(const data::TrainingSet& set, int p, FitInfo* info = nullptr);

Vec poly_forward(const PolyModel& model, const Vec& X_in,
                 bool* out_of_box = nullptr);

void save_checkpoint(const PolyModel& model, const std::string& path);
PolyModel load_checkpoint(const std::string& path);

}  // namespace flowmap::poly
