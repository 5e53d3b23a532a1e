#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "flowmap/rollout.hpp"

using namespace flowmap;
using Vec = Eigen::VectorXd;

namespace {

ModelLayout scalar_layout() {
  ModelLayout l;
  l.d = 1;
  l.input_arity = 2;
  l.n_b = 3;
  l.n_extra = 0;
  l.include_delta = true;
  l.basis = {input::BasisKind::LagrangeEquispaced, 2};
  l.system = "linear_scalar";
  return l;
}

signal::InputSignal scalar_sig() {
  signal::InputSignal sig;
  sig.channels = {signal::sinusoid(1.0, 4.0, 0.0, 1.0),
                  signal::cosine(1.0, 1.0)};
  return sig;
}

}  // namespace

TEST_CASE("uniform_grid spans the interval") {
  auto g = roll::uniform_grid(0.0, 1.0, 10);
  REQUIRE(g.size() == 11);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == doctest::Approx(1.0).epsilon(1e-15));
  for (std::size_t i = 1; i < g.size(); ++i)
    CHECK(g[i] - g[i - 1] == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("exact-increment oracle matches direct integration") {
  auto sys = dynamics::linear_scalar();
  roll::ExactStepModel model(sys, scalar_layout(), 20);
  // quadratic channels are captured exactly by the degree-2 basis, so the
  // only gap left between oracle rollout and direct integration is the
  // integrator error itself
  signal::InputSignal sig;
  sig.channels = {signal::polynomial({1.0, 0.05, -0.004}),
                  signal::polynomial({0.3, -0.02, 0.001})};
  auto grid = roll::uniform_grid(0.0, 10.0, 100);
  auto run = roll::predict(model, Vec::Constant(1, 2.0), sig, grid);
  REQUIRE_FALSE(run.failed);
  REQUIRE(run.predicted.times.size() == 101);

  dynamics::TimeSignal tsig = [&sig](double t) { return sig(t); };
  auto ref = dynamics::integrate(sys, Vec::Constant(1, 2.0), 0.0, 10.0, 2000,
                                 tsig);
  // compare at the shared grid points (every 20th reference state)
  for (int n = 0; n <= 100; ++n)
    CHECK(std::abs(run.predicted.states[n][0] - ref.states[20 * n][0]) < 1e-8);
}

TEST_CASE("zero network predicts a constant trajectory") {
  net::NetworkModel nm;
  nm.layout = scalar_layout();
  nm.params = net::init_params({nm.layout.input_dim(), 10, 1}, 1);
  nm.box_lo = Vec::Constant(nm.layout.input_dim(), -10.0);
  nm.box_hi = Vec::Constant(nm.layout.input_dim(), 10.0);
  roll::NetworkStepModel model(nm);
  auto run = roll::predict(model, Vec::Constant(1, 2.0), scalar_sig(),
                           roll::uniform_grid(0.0, 5.0, 50));
  REQUIRE_FALSE(run.failed);
  for (const auto& s : run.predicted.states) CHECK(s[0] == 2.0);
}

TEST_CASE("Markov consistency: one long run equals two chained runs") {
  auto sys = dynamics::linear_scalar();
  roll::ExactStepModel model(sys, scalar_layout(), 10);
  auto sig = scalar_sig();
  const int N = 20;
  auto full = roll::predict(model, Vec::Constant(1, 2.0), sig,
                            roll::uniform_grid(0.0, 2.0 * N * 0.1, 2 * N));
  auto first = roll::predict(model, Vec::Constant(1, 2.0), sig,
                             roll::uniform_grid(0.0, N * 0.1, N));
  auto second = roll::predict(model, first.predicted.states.back(), sig,
                              roll::uniform_grid(N * 0.1, 2.0 * N * 0.1, N));
  for (int n = 0; n <= N; ++n) {
    CHECK(full.predicted.states[n] == first.predicted.states[n]);
    CHECK(full.predicted.states[N + n] == second.predicted.states[n]);
  }
}

TEST_CASE("predict truncates on numeric blowup") {
  dynamics::SystemSpec sys;
  sys.name = "blowup";
  sys.d = 1;
  sys.input_arity = 2;
  sys.rhs = [](const Vec& x, const Vec&) {
    return (x.array().square().square() * 10.0).matrix().eval();
  };
  roll::ExactStepModel model(sys, scalar_layout(), 10);
  auto run = roll::predict(model, Vec::Constant(1, 3.0), scalar_sig(),
                           roll::uniform_grid(0.0, 10.0, 100));
  CHECK(run.failed);
  CHECK(run.predicted.times.size() < 101);
  CHECK(run.predicted.times.size() == run.predicted.states.size());
}

TEST_CASE("out-of-domain steps raise warnings, not failures") {
  net::NetworkModel nm;
  nm.layout = scalar_layout();
  nm.params = net::init_params({nm.layout.input_dim(), 10, 1}, 2);
  // a box so tight every input falls outside
  nm.box_lo = Vec::Constant(nm.layout.input_dim(), 100.0);
  nm.box_hi = Vec::Constant(nm.layout.input_dim(), 101.0);
  roll::NetworkStepModel model(nm);
  auto run = roll::predict(model, Vec::Constant(1, 2.0), scalar_sig(),
                           roll::uniform_grid(0.0, 1.0, 10));
  REQUIRE_FALSE(run.failed);
  REQUIRE(run.out_of_domain.size() == 10);
  for (char w : run.out_of_domain) CHECK(w == 1);
}

TEST_CASE("compare metrics") {
  dynamics::Trajectory a, b;
  for (int i = 0; i <= 10; ++i) {
    a.times.push_back(0.1 * i);
    b.times.push_back(0.1 * i);
    a.states.push_back(Vec::Constant(1, std::sin(0.1 * i)));
    b.states.push_back(Vec::Constant(1, std::sin(0.1 * i)));
  }
  SUBCASE("identical trajectories give zero metrics") {
    auto m = roll::compare(a, b);
    CHECK(m.linf == 0.0);
    CHECK(m.rel_linf == 0.0);
    CHECK(m.terminal == 0.0);
  }
  SUBCASE("constant offset 0.1") {
    dynamics::Trajectory c = b;
    for (auto& s : c.states) s.array() += 0.1;
    auto m = roll::compare(c, b);
    CHECK(m.linf == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(m.terminal == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(m.abs_error.size() == 11);
  }
  SUBCASE("grid mismatch is rejected") {
    dynamics::Trajectory c = b;
    c.times[3] += 0.01;
    CHECK_THROWS_AS(roll::compare(a, c), dynamics::ContractViolation);
  }
}

TEST_CASE("integrator self-consistency on predator-prey over [0,100]") {
  auto sys = dynamics::predator_prey();
  signal::InputSignal sig;
  sig.channels = {signal::sum(signal::sinusoid(1.0, 1.0 / 3.0, 0.0, 2.0),
                              signal::cosine(1.0, 1.0))};
  dynamics::TimeSignal tsig = [&sig](double t) { return sig(t); };
  Vec x0(2);
  x0 << 1.0, 2.0;
  auto coarse = dynamics::integrate(sys, x0, 0.0, 100.0, 10000, tsig);
  auto fine = dynamics::integrate(sys, x0, 0.0, 100.0, 20000, tsig);
  double worst = 0.0;
  for (int n = 0; n <= 10000; ++n)
    worst = std::max(worst,
                     (coarse.states[n] - fine.states[2 * n]).cwiseAbs().maxCoeff());
  CHECK(worst < 1e-8);
}

TEST_CASE("trajectory CSV and metrics JSON are written") {
  dynamics::Trajectory tr;
  tr.times = {0.0, 0.1};
  tr.states = {Vec::Constant(2, 1.0), Vec::Constant(2, 0.5)};
  roll::write_trajectory_csv(tr, "traj_test.csv");
  std::ifstream in("traj_test.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,x_0,x_1");
  int rows = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 2);
  std::remove("traj_test.csv");

  auto m = roll::compare(tr, tr);
  roll::write_metrics_json(m, "metrics_test.json");
  std::ifstream jm("metrics_test.json");
  CHECK(jm.good());
  std::remove("metrics_test.json");
}
