#include "flowmap/analysis.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "flowmap/rng.hpp"

namespace flowmap::analysis {

double input_bound(double L1, double L2, double eta, double t) {
  return L2 * eta * t * std::exp(L1 * t);
}

double rollout_bound(double L_phi, double E, int n) {
  if (n <= 0) return 0.0;
  if (std::abs(L_phi - 1.0) < 1e-12) return n * E;
  return (1.0 - std::pow(L_phi, n)) / (1.0 - L_phi) * E;
}

double combined_bound(const BoundInputs& in) {
  return input_bound(in.L1, in.L2, in.eta, in.t) +
         rollout_bound(in.L_phi, in.E, in.n);
}

double appendix_bound(double L1, double Delta, int n, double E) {
  if (n <= 0) return 0.0;
  const double a = L1 * Delta;
  if (std::abs(a) < 1e-12) return n * E;
  return (std::exp(n * a) - 1.0) / (std::exp(a) - 1.0) * E;
}

GronwallReport check_gronwall(const dynamics::SystemSpec& system,
                              const signal::InputSignal& gamma,
                              const input::BasisSpec& basis, const Vec& x0,
                              double T, double step_delta,
                              int micro_per_segment) {
  if (!system.lipschitz)
    throw dynamics::ContractViolation(
        "check_gronwall: system '" + system.name +
        "' carries no Lipschitz constants");
  const double L1 = system.lipschitz->L1;
  const double L2 = system.lipschitz->L2;
  const int N = static_cast<int>(std::round(T / step_delta));
  const std::vector<double> grid = roll::uniform_grid(0.0, T, N);
  const input::PiecewiseInput pw = input::fit_piecewise(gamma, grid, basis);

  GronwallReport report;
  report.eta = input::sup_error(gamma, pw, 101);

  // Integrate both systems segment by segment; inside a segment the
  // modified input is the local polynomial of that segment.
  Vec x_true = x0;
  Vec x_mod = x0;
  report.times.push_back(0.0);
  report.measured.push_back(0.0);
  report.bound.push_back(0.0);
  dynamics::TimeSignal true_sig = [&gamma](double t) { return gamma(t); };
  for (int n = 0; n < N; ++n) {
    const double t_n = grid[n];
    const double delta = grid[n + 1] - t_n;
    const auto& local = pw.segments[n];
    dynamics::TimeSignal mod_sig = [&local, t_n](double t) {
      return input::eval_local(local, t - t_n);
    };
    x_true = dynamics::integrate(system, x_true, t_n, t_n + delta,
                                 micro_per_segment, true_sig)
                 .states.back();
    x_mod = dynamics::integrate(system, x_mod, t_n, t_n + delta,
                                micro_per_segment, mod_sig)
                .states.back();
    report.times.push_back(grid[n + 1]);
    report.measured.push_back((x_true - x_mod).cwiseAbs().maxCoeff());
    report.bound.push_back(input_bound(L1, L2, report.eta, grid[n + 1]));
  }
  report.satisfied = true;
  for (std::size_t i = 0; i < report.measured.size(); ++i)
    if (report.measured[i] > report.bound[i] + 1e-12) report.satisfied = false;
  return report;
}

RolloutBoundReport check_rollout_bound(const roll::OneStepModel& model,
                                       const Vec& x0,
                                       const signal::InputSignal& sig,
                                       const std::vector<double>& grid,
                                       double E, double L_phi,
                                       std::uint64_t seed, bool adversarial,
                                       const Vec& extra) {
  const ModelLayout& layout = model.layout();
  RolloutBoundReport report;
  report.E = E;
  report.L_phi = L_phi;
  Vec clean = x0;
  Vec noisy = x0;
  report.measured.push_back(0.0);
  report.bound.push_back(0.0);
  for (std::size_t n = 0; n + 1 < grid.size(); ++n) {
    const double delta = grid[n + 1] - grid[n];
    input::LocalInputParams local =
        input::fit_local(sig, grid[n], delta, layout.basis);
    const Vec X_clean = data::assemble_input(clean, local.coeffs, delta, extra,
                                             layout.include_delta);
    const Vec X_noisy = data::assemble_input(noisy, local.coeffs, delta, extra,
                                             layout.include_delta);
    clean = model.step(X_clean, delta);
    noisy = model.step(X_noisy, delta);
    auto g = rng::stream(seed, n);
    for (int i = 0; i < noisy.size(); ++i)
      noisy[i] += adversarial ? E : E * g.uniform(-1.0, 1.0);
    report.measured.push_back((noisy - clean).cwiseAbs().maxCoeff());
    report.bound.push_back(
        rollout_bound(L_phi, E, static_cast<int>(n) + 1));
  }
  report.satisfied = true;
  for (std::size_t i = 0; i < report.measured.size(); ++i)
    if (report.measured[i] > report.bound[i] + 1e-12) report.satisfied = false;
  return report;
}

double estimate_lphi(const roll::OneStepModel& model,
                     const std::vector<data::Interval>& state_box,
                     const Mat& gamma, double delta, const Vec& extra,
                     int n_pairs, double dist, std::uint64_t seed) {
  const ModelLayout& layout = model.layout();
  const int d = layout.d;
  double worst = 0.0;
  for (int p = 0; p < n_pairs; ++p) {
    auto g = rng::stream(seed, p);
    Vec x(d), dir(d);
    for (int i = 0; i < d; ++i) x[i] = g.uniform(state_box[i].lo, state_box[i].hi);
    for (int i = 0; i < d; ++i) dir[i] = g.gaussian();
    const double norm = dir.norm();
    if (norm < 1e-12) continue;
    const Vec x2 = x + (dist / norm) * dir;
    const Vec a = model.step(
        data::assemble_input(x, gamma, delta, extra, layout.include_delta),
        delta);
    const Vec b = model.step(
        data::assemble_input(x2, gamma, delta, extra, layout.include_delta),
        delta);
    worst = std::max(worst, (a - b).norm() / dist);
  }
  return 1.1 * worst;
}

void write_gronwall_json(const GronwallReport& report,
                         const std::string& path) {
  nlohmann::json j;
  j["check"] = "gronwall_input_bound";
  j["eta"] = report.eta;
  j["times"] = report.times;
  j["measured"] = report.measured;
  j["bound"] = report.bound;
  j["satisfied"] = report.satisfied;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << j.dump(2) << "\n";
}

void write_rollout_bound_json(const RolloutBoundReport& report,
                              const std::string& path) {
  nlohmann::json j;
  j["check"] = "rollout_error_bound";
  j["L_phi"] = report.L_phi;
  j["E"] = report.E;
  j["measured"] = report.measured;
  j["bound"] = report.bound;
  j["satisfied"] = report.satisfied;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << j.dump(2) << "\n";
}

}  // namespace flowmap::analysis
