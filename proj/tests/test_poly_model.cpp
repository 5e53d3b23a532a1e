#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "flowmap/poly_model.hpp"
#include "flowmap/rng.hpp"

using namespace flowmap;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

namespace {

data::SamplingDomains scalar_domains() {
  data::SamplingDomains d;
  d.x = {{-2.0, 2.0}};
  d.gamma = {{{-5.0, 5.0}, {-5.0, 5.0}, {-5.0, 5.0}},
             {{-5.0, 5.0}, {-5.0, 5.0}, {-5.0, 5.0}}};
  d.delta = {0.05, 0.15};
  return d;
}

data::TrainingSet linear_set(int J, std::uint64_t seed) {
  auto sys = dynamics::linear_scalar();
  auto dom = scalar_domains();
  auto set = data::generate_pairs(
      sys, data::sample_inputs(dom, J, seed),
      {input::BasisKind::LagrangeEquispaced, 2}, 10);
  set.domains = dom;
  set.seed = seed;
  return set;
}

double fit_residual(const data::TrainingSet& set, int p) {
  poly::FitInfo info;
  poly::fit(set, p, &info);
  return info.residual_rms;
}

}  // namespace

TEST_CASE("total_degree_indices") {
  SUBCASE("m=2, p=1 in lexicographic order") {
    auto idx = poly::total_degree_indices(2, 1);
    REQUIRE(idx.size() == 3);
    CHECK(idx[0] == std::vector<int>{0, 0});
    CHECK(idx[1] == std::vector<int>{0, 1});
    CHECK(idx[2] == std::vector<int>{1, 0});
  }
  SUBCASE("m=8, p=2 has C(10,2)=45 indices") {
    CHECK(poly::total_degree_indices(8, 2).size() == 45);
  }
  SUBCASE("p=0 has only the zero index") {
    auto idx = poly::total_degree_indices(4, 0);
    REQUIRE(idx.size() == 1);
    CHECK(idx[0] == std::vector<int>{0, 0, 0, 0});
  }
  SUBCASE("capacity cap raises") {
    CHECK_THROWS_AS(poly::total_degree_indices(100, 10, 1000),
                    poly::CapacityError);
  }
}

TEST_CASE("features") {
  poly::PolyModel m;
  m.layout.d = 1;
  m.layout.input_arity = 0;
  m.layout.n_b = 0;
  m.layout.n_extra = 0;
  m.layout.include_delta = false;
  // single input coordinate on [-1, 1]
  m.degree = 2;
  m.index_set = poly::total_degree_indices(1, 2);
  m.box_lo = Vec::Constant(1, -1.0);
  m.box_hi = Vec::Constant(1, 1.0);
  m.coeffs = Mat::Zero(3, 1);

  SUBCASE("zero multi-index gives feature 1") {
    Vec phi = poly::features(Vec::Constant(1, 0.3), m);
    CHECK(phi[0] == 1.0);
  }
  SUBCASE("alpha=(2) at x_hat=0.5 is p_2(0.5) = -0.125") {
    Vec phi = poly::features(Vec::Constant(1, 0.5), m);
    CHECK(phi[2] == doctest::Approx(-0.125).epsilon(1e-14));
  }
  SUBCASE("odd-degree factors vanish at the box midpoint") {
    Vec phi = poly::features(Vec::Constant(1, 0.0), m);
    CHECK(phi[1] == doctest::Approx(0.0).epsilon(1e-15));
  }
  SUBCASE("out-of-box flag is set but evaluation proceeds") {
    bool flag = false;
    Vec phi = poly::features(Vec::Constant(1, 1.5), m, &flag);
    CHECK(flag);
    CHECK(std::isfinite(phi[2]));
    flag = true;
    poly::features(Vec::Constant(1, 0.2), m, &flag);
    CHECK_FALSE(flag);
  }
}

TEST_CASE("fit on identity data gives zero coefficients") {
  dynamics::SystemSpec sys;
  sys.name = "zero";
  sys.d = 1;
  sys.input_arity = 2;
  sys.rhs = [](const Vec&, const Vec&) { return Vec::Zero(1).eval(); };
  auto dom = scalar_domains();
  auto set = data::generate_pairs(
      sys, data::sample_inputs(dom, 300, 2),
      {input::BasisKind::LagrangeEquispaced, 2}, 2);
  auto m = poly::fit(set, 2);
  CHECK(m.coeffs.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(poly::poly_forward(m, data::assemble_input(
                                  Vec::Constant(1, 1.3),
                                  set.samples[0].gamma, 0.1, Vec()))[0] ==
        doctest::Approx(1.3).epsilon(1e-12));
}

TEST_CASE("fit recovers a planted degree-2 increment exactly") {
  // build synthetic samples whose increment is a known degree-2 polynomial
  // of the normalized inputs
  auto dom = scalar_domains();
  auto inputs = data::sample_inputs(dom, 500, 3);
  data::TrainingSet set;
  set.d = 1;
  set.input_arity = 2;
  set.n_b = 3;
  set.n_extra = 0;
  set.meta.include_delta = true;
  set.meta.basis = {input::BasisKind::LagrangeEquispaced, 2};
  set.domains = dom;
  for (const auto& s : inputs) {
    data::TrainingSample ts;
    ts.x_in = s.x;
    ts.gamma = s.gamma;
    ts.delta = s.delta;
    ts.extra = s.extra;
    const Vec v = data::assemble_input(s.x, s.gamma, s.delta, s.extra);
    const double inc = 0.4 + 0.7 * v[0] - 0.2 * v[1] * v[4] + 0.05 * v[2] * v[2];
    ts.x_out = s.x + Vec::Constant(1, inc);
    set.samples.push_back(std::move(ts));
  }
  // recompute the input box
  Mat X(8, set.samples.size());
  for (std::size_t j = 0; j < set.samples.size(); ++j)
    X.col(j) = data::assemble_input(set.samples[j].x_in, set.samples[j].gamma,
                                    set.samples[j].delta, set.samples[j].extra);
  set.input_lo = X.rowwise().minCoeff();
  set.input_hi = X.rowwise().maxCoeff();

  poly::FitInfo info;
  auto m = poly::fit(set, 2, &info);
  CHECK(info.residual_rms < 1e-10);
  for (const auto& s : set.samples) {
    Vec pred = poly::poly_forward(
        m, data::assemble_input(s.x_in, s.gamma, s.delta, s.extra));
    CHECK(std::abs(pred[0] - s.x_out[0]) < 1e-9);
  }
}

TEST_CASE("fit residual is non-increasing in the degree") {
  auto set = linear_set(1500, 4);
  double prev = 1e30;
  for (int p = 1; p <= 5; ++p) {
    const double r = fit_residual(set, p);
    CHECK(r <= prev + 1e-12);
    prev = r;
  }
  // p=4 beats p=2 strictly on this smooth system
  CHECK(fit_residual(set, 4) < fit_residual(set, 2));
}

TEST_CASE("fit warns on underdetermined systems via FitInfo") {
  auto set = linear_set(20, 6);  // far fewer samples than degree-3 features
  poly::FitInfo info;
  poly::fit(set, 3, &info);
  CHECK(info.underdetermined);
  CHECK(info.rank <= 20);
}

TEST_CASE("poly_forward with hand-set constant coefficient") {
  auto set = linear_set(200, 7);
  auto m = poly::fit(set, 1);
  m.coeffs.setZero();
  m.coeffs(0, 0) = 0.25;  // constant feature only
  Vec X = data::assemble_input(Vec::Constant(1, 1.0), set.samples[0].gamma,
                               0.1, Vec());
  CHECK(poly::poly_forward(m, X)[0] == doctest::Approx(1.25).epsilon(1e-14));
}

TEST_CASE("polynomial checkpoint round trip") {
  auto set = linear_set(300, 8);
  auto m = poly::fit(set, 2);
  poly::save_checkpoint(m, "poly_ckpt_test.json");
  auto loaded = poly::load_checkpoint("poly_ckpt_test.json");
  CHECK(loaded.degree == m.degree);
  CHECK(loaded.index_set == m.index_set);
  CHECK(loaded.coeffs == m.coeffs);
  CHECK(loaded.box_lo == m.box_lo);
  CHECK(loaded.box_hi == m.box_hi);
  CHECK(loaded.layout.input_dim() == m.layout.input_dim());
  // identical predictions after reload
  Vec X = data::assemble_input(set.samples[0].x_in, set.samples[0].gamma,
                               set.samples[0].delta, set.samples[0].extra);
  CHECK(poly::poly_forward(loaded, X) == poly::poly_forward(m, X));
  std::remove("poly_ckpt_test.json");
}
