#include "flowmap/flownet.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "flowmap/rng.hpp"

namespace flowmap {

ModelLayout layout_of(const data::TrainingSet& set) {
  ModelLayout l;
  l.d = set.d;
  l.input_arity = set.input_arity;
  l.n_b = set.n_b;
  l.n_extra = set.n_extra;
  l.include_delta = set.meta.include_delta;
  l.basis = set.meta.basis;
  l.system = set.meta.system;
  return l;
}

namespace net {

NetParams init_params(const std::vector<int>& layer_sizes,
                      std::uint64_t seed) {
  if (layer_sizes.size() < 3)
    throw std::invalid_argument(
        "init_params: need at least one hidden layer (m, h..., d)");
  NetParams p;
  p.layer_sizes = layer_sizes;
  const int m = layer_sizes.front();
  p.in_shift = Vec::Zero(m);
  p.in_scale = Vec::Ones(m);
  const std::size_t n_layers = layer_sizes.size() - 1;
  p.weights.resize(n_layers);
  for (std::size_t l = 0; l < n_layers; ++l) {
    const int fan_in = layer_sizes[l];
    const int fan_out = layer_sizes[l + 1];
    p.weights[l].setZero(fan_out, fan_in + 1);
    if (l + 1 == n_layers) continue;  // output layer stays zero
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    auto g = rng::stream(seed, l);
    for (int r = 0; r < fan_out; ++r)
      for (int c = 0; c < fan_in; ++c)
        p.weights[l](r, c) = g.uniform(-bound, bound);
  }
  return p;
}

namespace {

Mat augment(const Mat& a) {
  Mat out(a.rows() + 1, a.cols());
  out.topRows(a.rows()) = a;
  out.row(a.rows()).setOnes();
  return out;
}

void check_finite(const Mat& a, std::size_t layer) {
  if (!a.allFinite()) {
    std::ostringstream os;
    os << "fnn_forward: non-finite activation at layer " << layer;
    throw NumericError(os.str());
  }
}

}  // namespace

Mat fnn_forward(const NetParams& params, const Mat& y_in, ForwardCache* cache) {
  if (y_in.rows() != params.input_dim()) {
    std::ostringstream os;
    os << "fnn_forward: input has " << y_in.rows() << " rows, expected "
       << params.input_dim();
    throw std::invalid_argument(os.str());
  }
  Mat a = (y_in.colwise() - params.in_shift).array().colwise() *
          params.in_scale.array();
  if (cache) {
    cache->activations.clear();
    cache->activations.push_back(a);
  }
  const std::size_t n_layers = params.weights.size();
  for (std::size_t l = 0; l < n_layers; ++l) {
    a = params.weights[l] * augment(a);
    if (l + 1 < n_layers) a = a.array().tanh();
    check_finite(a, l + 1);
    if (cache && l + 1 < n_layers) cache->activations.push_back(a);
  }
  return a;
}

Vec fnn_forward(const NetParams& params, const Vec& y_in) {
  return fnn_forward(params, Mat(y_in), nullptr).col(0);
}

Mat model_forward(const NetParams& params, const Mat& X_in) {
  const int d = params.output_dim();
  return X_in.topRows(d) + fnn_forward(params, X_in);
}

Vec model_forward(const NetParams& params, const Vec& X_in) {
  return model_forward(params, Mat(X_in)).col(0);
}

std::vector<Mat> model_backward(const NetParams& params,
                                const ForwardCache& cache,
                                const Mat& residual) {
  const std::size_t n_layers = params.weights.size();
  if (cache.activations.size() != n_layers)
    throw std::invalid_argument("model_backward: cache does not match network");
  std::vector<Mat> grads(n_layers);
  Mat delta = residual;  // dLoss/d(pre-activation of output layer)
  for (std::size_t l = n_layers; l-- > 0;) {
    grads[l] = delta * augment(cache.activations[l]).transpose();
    if (l > 0) {
      const int in_dim = params.layer_sizes[l];
      delta = params.weights[l].leftCols(in_dim).transpose() * delta;
      delta.array() *= 1.0 - cache.activations[l].array().square();
    }
  }
  return grads;
}

namespace {

std::vector<double> to_flat(const Vec& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

nlohmann::json layout_json(const ModelLayout& l) {
  return {{"d", l.d},
          {"input_arity", l.input_arity},
          {"n_b", l.n_b},
          {"n_extra", l.n_extra},
          {"include_delta", l.include_delta},
          {"basis",
           {{"kind", input::to_string(l.basis.kind)},
            {"degree", l.basis.degree}}},
          {"system", l.system}};
}

ModelLayout layout_from_json(const nlohmann::json& j) {
  ModelLayout l;
  l.d = j.at("d").get<int>();
  l.input_arity = j.at("input_arity").get<int>();
  l.n_b = j.at("n_b").get<int>();
  l.n_extra = j.at("n_extra").get<int>();
  l.include_delta = j.at("include_delta").get<bool>();
  l.basis.kind =
      input::basis_kind_from_string(j.at("basis").at("kind").get<std::string>());
  l.basis.degree = j.at("basis").at("degree").get<int>();
  l.system = j.at("system").get<std::string>();
  return l;
}

}  // namespace

void save_checkpoint(const NetworkModel& model, const std::string& path) {
  nlohmann::json j;
  j["type"] = "network";
  j["activation"] = "tanh";
  j["layer_sizes"] = model.params.layer_sizes;
  j["layout"] = layout_json(model.layout);
  j["norm"] = {{"shift", to_flat(model.params.in_shift)},
               {"scale", to_flat(model.params.in_scale)}};
  j["input_box"] = {{"lo", to_flat(model.box_lo)}, {"hi", to_flat(model.box_hi)}};
  std::vector<double> flat;
  for (const auto& w : model.params.weights)
    for (int r = 0; r < w.rows(); ++r)
      for (int c = 0; c < w.cols(); ++c) flat.push_back(w(r, c));
  j["weights"] = flat;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << j.dump(2) << "\n";
}

NetworkModel load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  in >> j;
  if (j.at("type").get<std::string>() != "network")
    throw std::runtime_error(path + " is not a network checkpoint");
  NetworkModel model;
  model.params.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
  model.layout = layout_from_json(j.at("layout"));
  const auto shift = j.at("norm").at("shift").get<std::vector<double>>();
  const auto scale = j.at("norm").at("scale").get<std::vector<double>>();
  model.params.in_shift = Eigen::Map<const Vec>(shift.data(), shift.size());
  model.params.in_scale = Eigen::Map<const Vec>(scale.data(), scale.size());
  const auto lo = j.at("input_box").at("lo").get<std::vector<double>>();
  const auto hi = j.at("input_box").at("hi").get<std::vector<double>>();
  model.box_lo = Eigen::Map<const Vec>(lo.data(), lo.size());
  model.box_hi = Eigen::Map<const Vec>(hi.data(), hi.size());
  const auto flat = j.at("weights").get<std::vector<double>>();
  std::size_t pos = 0;
  for (std::size_t l = 0; l + 1 < model.params.layer_sizes.size(); ++l) {
    const int rows = model.params.layer_sizes[l + 1];
    const int cols = model.params.layer_sizes[l] + 1;
    Mat w(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) w(r, c) = flat.at(pos++);
    model.params.weights.push_back(std::move(w));
  }
  if (pos != flat.size())
    throw std::runtime_error("checkpoint weight array has trailing data");
  return model;
}

}  // namespace net
}  // namespace flowmap
