#include "flowmap/rollout.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "flowmap/input_param.hpp"

namespace flowmap::roll {

namespace {

bool in_box(const Vec& x, const Vec& lo, const Vec& hi) {
  if (lo.size() != x.size()) return true;  // no box recorded
  for (int i = 0; i < x.size(); ++i) {
    const double tol = 1e-9 * std::max(1.0, hi[i] - lo[i]);
    if (x[i] < lo[i] - tol || x[i] > hi[i] + tol) return false;
  }
  return true;
}

}  // namespace

NetworkStepModel::NetworkStepModel(net::NetworkModel model)
    : model_(std::move(model)) {}

Vec NetworkStepModel::step(const Vec& X_in, double, bool* out_of_domain) const {
  if (out_of_domain)
    *out_of_domain = !in_box(X_in, model_.box_lo, model_.box_hi);
  return net::model_forward(model_.params, X_in);
}

PolyStepModel::PolyStepModel(poly::PolyModel model) : model_(std::move(model)) {}

Vec PolyStepModel::step(const Vec& X_in, double, bool* out_of_domain) const {
  return poly::poly_forward(model_, X_in, out_of_domain);
}

ExactStepModel::ExactStepModel(data::SystemFactory factory, ModelLayout layout,
                               int micro_steps)
    : factory_(std::move(factory)),
      layout_(std::move(layout)),
      micro_steps_(micro_steps) {}

ExactStepModel::ExactStepModel(const dynamics::SystemSpec& system,
                               ModelLayout layout, int micro_steps)
    : factory_([system](const Vec&) { return system; }),
      layout_(std::move(layout)),
      micro_steps_(micro_steps) {}

Vec ExactStepModel::step(const Vec& X_in, double delta,
                         bool* out_of_domain) const {
  if (out_of_domain) *out_of_domain = false;
  const int d = layout_.d;
  const int arity = layout_.input_arity;
  const int n_b = layout_.n_b;
  input::LocalInputParams local;
  local.coeffs.resize(arity, n_b);
  int pos = d;
  for (int r = 0; r < arity; ++r)
    for (int c = 0; c < n_b; ++c) local.coeffs(r, c) = X_in[pos++];
  Vec extra = X_in.segment(pos, layout_.n_extra);
  local.delta = delta;
  local.basis = layout_.basis;
  dynamics::SystemSpec sys = factory_(extra);
  int steps = micro_steps_;
  if (sys.max_step)
    steps = std::max(steps, static_cast<int>(std::ceil(delta / *sys.max_step)));
  dynamics::TimeSignal sig = [&local](double tau) {
    return input::eval_local(local, tau);
  };
  return dynamics::integrate(sys, X_in.head(d), 0.0, delta, steps, sig)
      .states.back();
}

std::vector<double> uniform_grid(double t0, double t1, int n_steps) {
  std::vector<double> grid(n_steps + 1);
  for (int i = 0; i <= n_steps; ++i)
    grid[i] = t0 + (t1 - t0) * i / n_steps;
  return grid;
}

PredictionRun predict(const OneStepModel& model, const Vec& x0,
                      const signal::InputSignal& sig,
                      const std::vector<double>& grid, const Vec& extra) {
  const ModelLayout& layout = model.layout();
  if (x0.size() != layout.d)
    throw dynamics::ContractViolation("predict: x0 length does not match model");
  if (sig.arity() != layout.input_arity)
    throw dynamics::ContractViolation(
        "predict: signal arity does not match model");
  if (extra.size() != layout.n_extra)
    throw dynamics::ContractViolation(
        "predict: extra parameter count does not match model");
  if (grid.size() < 2)
    throw dynamics::ContractViolation("predict: grid needs >= 2 points");
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    if (grid[i + 1] <= grid[i])
      throw dynamics::ContractViolation("predict: grid must be increasing");

  PredictionRun run;
  run.fitted_inputs.breakpoints = grid;
  run.predicted.times.push_back(grid[0]);
  run.predicted.states.push_back(x0);
  Vec x = x0;
  for (std::size_t n = 0; n + 1 < grid.size(); ++n) {
    const double delta = grid[n + 1] - grid[n];
    input::LocalInputParams local =
        input::fit_local(sig, grid[n], delta, layout.basis);
    run.fitted_inputs.segments.push_back(local);
    const Vec X_in = data::assemble_input(x, local.coeffs, delta, extra,
                                          layout.include_delta);
    bool warn = false;
    Vec next;
    try {
      next = model.step(X_in, delta, &warn);
    } catch (const dynamics::NumericOverflow&) {
      next = Vec::Constant(layout.d,
                           std::numeric_limits<double>::quiet_NaN());
    } catch (const net::NumericError&) {
      next = Vec::Constant(layout.d,
                           std::numeric_limits<double>::quiet_NaN());
    }
    run.out_of_domain.push_back(warn ? 1 : 0);
    if (!next.allFinite()) {
      run.failed = true;
      run.failure_index = n;
      break;
    }
    x = std::move(next);
    run.predicted.times.push_back(grid[n + 1]);
    run.predicted.states.push_back(x);
  }
  return run;
}

CompareMetrics compare(const dynamics::Trajectory& pred,
                       const dynamics::Trajectory& ref) {
  if (pred.times.size() != ref.times.size())
    throw dynamics::ContractViolation("compare: trajectory lengths differ");
  for (std::size_t i = 0; i < pred.times.size(); ++i)
    if (std::abs(pred.times[i] - ref.times[i]) >
        1e-9 * std::max(1.0, std::abs(ref.times[i])))
      throw dynamics::ContractViolation("compare: time grids differ");

  CompareMetrics m;
  const int d = static_cast<int>(ref.states[0].size());
  m.per_coord_linf = Vec::Zero(d);
  double ref_linf = 0.0;
  for (std::size_t i = 0; i < pred.times.size(); ++i) {
    const Vec err = (pred.states[i] - ref.states[i]).cwiseAbs();
    m.abs_error.push_back(err.maxCoeff());
    m.per_coord_linf = m.per_coord_linf.cwiseMax(err);
    m.linf = std::max(m.linf, err.maxCoeff());
    ref_linf = std::max(ref_linf, ref.states[i].cwiseAbs().maxCoeff());
  }
  m.rel_linf = m.linf / std::max(ref_linf, 1e-12);
  m.terminal = m.abs_error.back();
  return m;
}

void write_trajectory_csv(const dynamics::Trajectory& traj,
                          const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  const int d = static_cast<int>(traj.states[0].size());
  out << "t";
  for (int i = 0; i < d; ++i) out << ",x_" << i;
  out << "\n";
  char buf[40];
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", traj.times[i]);
    out << buf;
    for (int c = 0; c < d; ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", traj.states[i][c]);
      out << "," << buf;
    }
    out << "\n";
  }
}

void write_metrics_json(const CompareMetrics& metrics,
                        const std::string& path) {
  nlohmann::json j;
  j["linf"] = metrics.linf;
  j["rel_linf"] = metrics.rel_linf;
  j["terminal"] = metrics.terminal;
  j["per_coord_linf"] = std::vector<double>(
      metrics.per_coord_linf.data(),
      metrics.per_coord_linf.data() + metrics.per_coord_linf.size());
  j["abs_error"] = metrics.abs_error;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << j.dump(2) << "\n";
}

}  // namespace flowmap::roll
