#include "flowmap/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "flowmap/rng.hpp"

namespace flowmap::train {

AdamState AdamState::like(const NetParams& params) {
  AdamState s;
  s.m.reserve(params.weights.size());
  s.v.reserve(params.weights.size());
  for (const auto& w : params.weights) {
    s.m.push_back(Mat::Zero(w.rows(), w.cols()));
    s.v.push_back(Mat::Zero(w.rows(), w.cols()));
  }
  return s;
}

void adam_step(NetParams& params, AdamState& state,
               const std::vector<Mat>& grads, double lr, double beta1,
               double beta2, double eps) {
  if (grads.size() != params.weights.size())
    throw std::invalid_argument("adam_step: gradient shape mismatch");
  ++state.step;
  const double bc1 = 1.0 - std::pow(beta1, state.step);
  const double bc2 = 1.0 - std::pow(beta2, state.step);
  for (std::size_t l = 0; l < grads.size(); ++l) {
    state.m[l] = beta1 * state.m[l] + (1.0 - beta1) * grads[l];
    state.v[l] =
        beta2 * state.v[l].array() + (1.0 - beta2) * grads[l].array().square();
    const auto m_hat = state.m[l].array() / bc1;
    const auto v_hat = state.v[l].array() / bc2;
    params.weights[l].array() -= lr * m_hat / (v_hat.sqrt() + eps);
  }
}

void design_matrices(const data::TrainingSet& set, Mat& X, Mat& Y) {
  const int J = static_cast<int>(set.samples.size());
  const int m = set.input_dim();
  X.resize(m, J);
  Y.resize(set.d, J);
  for (int j = 0; j < J; ++j) {
    const auto& s = set.samples[j];
    X.col(j) = data::assemble_input(s.x_in, s.gamma, s.delta, s.extra,
                                    set.meta.include_delta);
    Y.col(j) = s.x_out;
  }
}

double mse_loss(const NetParams& params, const Mat& X, const Mat& Y) {
  if (X.cols() == 0) throw std::invalid_argument("mse_loss: empty batch");
  const Mat R = net::model_forward(params, X) - Y;
  return R.squaredNorm() / static_cast<double>(X.cols());
}

double mse_loss(const NetParams& params, const data::TrainingSet& set) {
  Mat X, Y;
  design_matrices(set, X, Y);
  return mse_loss(params, X, Y);
}

TrainReport train(NetParams params, const data::TrainingSet& set,
                  const TrainConfig& cfg) {
  if (set.samples.empty()) throw std::invalid_argument("train: empty dataset");
  if (cfg.batch_size < 1 || cfg.learning_rate <= 0.0 ||
      cfg.validation_fraction < 0.0 || cfg.validation_fraction >= 1.0)
    throw std::invalid_argument("train: bad configuration");
  Mat X, Y;
  design_matrices(set, X, Y);
  if (X.rows() != params.input_dim() || Y.rows() != params.output_dim())
    throw std::invalid_argument("train: dataset dimensions do not match net");

  // Map every input coordinate into [-1, 1] using the recorded domain box.
  // The residual path reads the raw state, so the identity structure is
  // unchanged.
  const int m = params.input_dim();
  for (int i = 0; i < m; ++i) {
    const double lo = set.input_lo[i];
    const double hi = set.input_hi[i];
    if (hi - lo > 1e-300) {
      params.in_shift[i] = 0.5 * (lo + hi);
      params.in_scale[i] = 2.0 / (hi - lo);
    } else {
      params.in_shift[i] = lo;
      params.in_scale[i] = 1.0;
    }
  }

  const int J = static_cast<int>(set.samples.size());
  std::vector<std::size_t> order(J);
  for (int j = 0; j < J; ++j) order[j] = j;
  rng::shuffle(order, cfg.seed, 0);  // split round
  const int n_val = static_cast<int>(cfg.validation_fraction * J);
  std::vector<std::size_t> val_idx(order.end() - n_val, order.end());
  std::vector<std::size_t> train_idx(order.begin(), order.end() - n_val);
  const int n_train = static_cast<int>(train_idx.size());
  if (n_train == 0) throw std::invalid_argument("train: no training samples");

  Mat X_val(X.rows(), n_val), Y_val(Y.rows(), n_val);
  for (int j = 0; j < n_val; ++j) {
    X_val.col(j) = X.col(static_cast<int>(val_idx[j]));
    Y_val.col(j) = Y.col(static_cast<int>(val_idx[j]));
  }

  AdamState opt = AdamState::like(params);
  TrainReport report;
  report.loss_history.reserve(cfg.epochs);
  report.val_history.reserve(cfg.epochs);

  Mat Xb, Yb;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng::shuffle(train_idx, cfg.seed, static_cast<std::uint64_t>(epoch) + 1);
    double sq_sum = 0.0;
    for (int start = 0; start < n_train; start += cfg.batch_size) {
      const int b = std::min(cfg.batch_size, n_train - start);
      Xb.resize(X.rows(), b);
      Yb.resize(Y.rows(), b);
      for (int j = 0; j < b; ++j) {
        Xb.col(j) = X.col(static_cast<int>(train_idx[start + j]));
        Yb.col(j) = Y.col(static_cast<int>(train_idx[start + j]));
      }
      net::ForwardCache cache;
      const Mat out = Xb.topRows(Y.rows()) + net::fnn_forward(params, Xb, &cache);
      const Mat R = out - Yb;
      const double batch_sq = R.squaredNorm();
      if (!std::isfinite(batch_sq)) {
        std::ostringstream os;
        os << "train: non-finite loss at epoch " << epoch << ", batch offset "
           << start;
        throw net::NumericError(os.str());
      }
      sq_sum += batch_sq;
      std::vector<Mat> grads = net::model_backward(params, cache, R);
      const double scale = 2.0 / b;  // d/dw of (1/b) sum ||r||^2
      for (auto& g : grads) g *= scale;
      adam_step(params, opt, grads, cfg.learning_rate, cfg.beta1, cfg.beta2,
                cfg.eps);
    }
    report.loss_history.push_back(sq_sum / n_train);
    report.val_history.push_back(
        n_val > 0 ? mse_loss(params, X_val, Y_val)
                  : std::numeric_limits<double>::quiet_NaN());
  }
  report.final_params = std::move(params);
  return report;
}

void write_loss_csv(const TrainReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "epoch,train_mse,val_mse\n";
  char buf[96];
  for (std::size_t e = 0; e < report.loss_history.size(); ++e) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", e,
                  report.loss_history[e], report.val_history[e]);
    out << buf;
  }
}

}  // namespace flowmap::train
