#include "flowmap/poly_model.hpp"

#include <Eigen/QR>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "flowmap/input_param.hpp"
#include "flowmap/trainer.hpp"

namespace flowmap::poly {

namespace {

// C(m+p, p) with an overflow-safe early exit against `cap`.
std::size_t index_count(int m, int p, std::size_t cap) {
  long double count = 1.0L;
  for (int i = 1; i <= p; ++i) {
    count *= static_cast<long double>(m + i) / i;
    if (count > 2.0L * static_cast<long double>(cap)) return cap + 1;
  }
  return static_cast<std::size_t>(count + 0.5L);
}

void gen_indices(int m, int p, std::vector<int>& cur,
                 std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == m) {
    out.push_back(cur);
    return;
  }
  for (int a = 0; a <= p; ++a) {
    cur.push_back(a);
    gen_indices(m, p - a, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<std::vector<int>> total_degree_indices(int m, int p,
                                                   std::size_t cap) {
  if (m < 1 || p < 0)
    throw std::invalid_argument("total_degree_indices: need m >= 1, p >= 0");
  const std::size_t n = index_count(m, p, cap);
  if (n > cap) {
    std::ostringstream os;
    os << "total_degree_indices: C(" << m << "+" << p << ", " << p
       << ") exceeds cap " << cap;
    throw CapacityError(os.str());
  }
  std::vector<std::vector<int>> out;
  out.reserve(n);
  std::vector<int> cur;
  gen_indices(m, p, cur, out);
  return out;
}

namespace {

Vec normalize_input(const Vec& x, const Vec& lo, const Vec& hi,
                    bool* out_of_box) {
  Vec z(x.size());
  bool outside = false;
  for (int i = 0; i < x.size(); ++i) {
    const double width = hi[i] - lo[i];
    if (width > 1e-300) {
      z[i] = 2.0 * (x[i] - lo[i]) / width - 1.0;
    } else {
      z[i] = 0.0;
    }
    if (z[i] < -1.0 - 1e-9 || z[i] > 1.0 + 1e-9) outside = true;
  }
  if (out_of_box) *out_of_box = outside;
  return z;
}

}  // namespace

Vec features(const Vec& model_input, const PolyModel& model,
             bool* out_of_box) {
  if (model_input.size() != model.input_dim())
    throw std::invalid_argument("features: input dimension mismatch");
  const Vec z =
      normalize_input(model_input, model.box_lo, model.box_hi, out_of_box);
  const int m = static_cast<int>(z.size());
  const int p = model.degree;
  // Univariate Legendre table: uni(i, j) = p_j(z_i).
  Mat uni(m, p + 1);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= p; ++j) uni(i, j) = input::legendre(j, z[i]);
  Vec phi(model.index_set.size());
  for (std::size_t a = 0; a < model.index_set.size(); ++a) {
    double v = 1.0;
    const auto& alpha = model.index_set[a];
    for (int i = 0; i < m; ++i)
      if (alpha[i] > 0) v *= uni(i, alpha[i]);
    phi[static_cast<int>(a)] = v;
  }
  return phi;
}

PolyModel fit(const data::TrainingSet& set, int p, FitInfo* info) {
  if (set.samples.empty()) throw std::invalid_argument("fit: empty dataset");
  PolyModel model;
  model.layout = layout_of(set);
  model.degree = p;
  model.box_lo = set.input_lo;
  model.box_hi = set.input_hi;
  const int m = model.input_dim();
  model.index_set = total_degree_indices(m, p);
  const int F = static_cast<int>(model.index_set.size());
  const int J = static_cast<int>(set.samples.size());

  FitInfo local;
  local.n_features = F;
  local.underdetermined = J < F;
  if (local.underdetermined)
    std::cerr << "poly::fit: J=" << J << " samples < " << F
              << " features; fit is underdetermined\n";

  Mat X, Ynext;
  train::design_matrices(set, X, Ynext);
  Mat A(J, F);
  for (int j = 0; j < J; ++j) A.row(j) = features(X.col(j), model).transpose();
  Mat Y(J, set.d);
  for (int j = 0; j < J; ++j)
    Y.row(j) = (Ynext.col(j) - X.col(j).head(set.d)).transpose();

  Eigen::ColPivHouseholderQR<Mat> qr(A);
  qr.setThreshold(1e-12);
  model.coeffs = qr.solve(Y);
  local.rank = qr.rank();
  local.rank_deficient = local.rank < F && !local.underdetermined;
  if (local.rank_deficient)
    std::cerr << "poly::fit: rank-deficient design matrix, effective rank "
              << local.rank << " of " << F << "\n";
  local.residual_rms =
      std::sqrt((A * model.coeffs - Y).squaredNorm() /
                static_cast<double>(J * set.d));
  if (info) *info = local;
  return model;
}

Vec poly_forward(const PolyModel& model, const Vec& X_in, bool* out_of_box) {
  if (X_in.size() != model.input_dim())
    throw std::invalid_argument("poly_forward: input dimension mismatch");
  const Vec phi = features(X_in, model, out_of_box);
  return X_in.head(model.layout.d) + model.coeffs.transpose() * phi;
}

void save_checkpoint(const PolyModel& model, const std::string& path) {
  nlohmann::json j;
  j["type"] = "polynomial";
  j["degree"] = model.degree;
  j["layout"] = {{"d", model.layout.d},
                 {"input_arity", model.layout.input_arity},
                 {"n_b", model.layout.n_b},
                 {"n_extra", model.layout.n_extra},
                 {"include_delta", model.layout.include_delta},
                 {"basis",
                  {{"kind", input::to_string(model.layout.basis.kind)},
                   {"degree", model.layout.basis.degree}}},
                 {"system", model.layout.system}};
  j["box"] = {{"lo", std::vector<double>(model.box_lo.data(),
                                         model.box_lo.data() + model.box_lo.size())},
              {"hi", std::vector<double>(model.box_hi.data(),
                                         model.box_hi.data() + model.box_hi.size())}};
  std::vector<double> flat;
  for (int r = 0; r < model.coeffs.rows(); ++r)
    for (int c = 0; c < model.coeffs.cols(); ++c)
      flat.push_back(model.coeffs(r, c));
  j["coeffs"] = flat;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << j.dump(2) << "\n";
}

PolyModel load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  in >> j;
  if (j.at("type").get<std::string>() != "polynomial")
    throw std::runtime_error(path + " is not a polynomial checkpoint");
  PolyModel model;
  model.degree = j.at("degree").get<int>();
  const auto& jl = j.at("layout");
  model.layout.d = jl.at("d").get<int>();
  model.layout.input_arity = jl.at("input_arity").get<int>();
  model.layout.n_b = jl.at("n_b").get<int>();
  model.layout.n_extra = jl.at("n_extra").get<int>();
  model.layout.include_delta = jl.at("include_delta").get<bool>();
  model.layout.basis.kind = input::basis_kind_from_string(
      jl.at("basis").at("kind").get<std::string>());
  model.layout.basis.degree = jl.at("basis").at("degree").get<int>();
  model.layout.system = jl.at("system").get<std::string>();
  const auto lo = j.at("box").at("lo").get<std::vector<double>>();
  const auto hi = j.at("box").at("hi").get<std::vector<double>>();
  model.box_lo = Eigen::Map<const Vec>(lo.data(), lo.size());
  model.box_hi = Eigen::Map<const Vec>(hi.data(), hi.size());
  model.index_set = total_degree_indices(model.input_dim(), model.degree);
  const auto flat = j.at("coeffs").get<std::vector<double>>();
  const int F = static_cast<int>(model.index_set.size());
  if (flat.size() != static_cast<std::size_t>(F) * model.layout.d)
    throw std::runtime_error("polynomial checkpoint coefficient count mismatch");
  model.coeffs.resize(F, model.layout.d);
  std::size_t pos = 0;
  for (int r = 0; r < F; ++r)
    for (int c = 0; c < model.layout.d; ++c) model.coeffs(r, c) = flat[pos++];
  return model;
}

}  // namespace flowmap::poly
