// flowmap: batch experiment runner for the flow-map learning pipeline.
//
// Subcommands: simulate | gen-data | train | predict | bounds | bench.
// Every run is driven by a JSON config (fail-closed: unknown keys are
// rejected) and writes its artifacts into the output directory.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "flowmap/analysis.hpp"
#include "flowmap/experiments.hpp"
#include "flowmap/rollout.hpp"
#include "flowmap/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace flowmap;

namespace {

using Vec = Eigen::VectorXd;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key()))
      throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  check_keys(j,
             {"preset", "basis", "domains", "dataset", "model", "train",
              "prediction", "bounds", "seed", "out"},
             "config");
  return j;
}

signal::ScalarSignal parse_term(const json& t) {
  check_keys(t,
             {"type", "value", "slope", "offset", "amp", "freq", "phase",
              "scale", "period", "coeffs"},
             "signal term");
  const std::string type = t.at("type").get<std::string>();
  if (type == "constant") return signal::constant(t.at("value").get<double>());
  if (type == "linear")
    return signal::linear(t.at("slope").get<double>(),
                          t.value("offset", 0.0));
  if (type == "sin")
    return signal::sinusoid(t.value("amp", 1.0), t.at("freq").get<double>(),
                            t.value("phase", 0.0), t.value("offset", 0.0));
  if (type == "cos")
    return signal::cosine(t.value("amp", 1.0), t.at("freq").get<double>(),
                          t.value("offset", 0.0));
  if (type == "chirp_cos") return signal::chirp_cos(t.at("scale").get<double>());
  if (type == "sawtooth")
    return signal::sawtooth(t.value("period", 1.0), t.value("amp", 1.0));
  if (type == "polynomial")
    return signal::polynomial(t.at("coeffs").get<std::vector<double>>());
  throw ConfigError("unknown signal term type '" + type + "'");
}

signal::InputSignal parse_signal(const json& channels) {
  if (!channels.is_array() || channels.empty())
    throw ConfigError("prediction.signal must be a non-empty array of channels");
  signal::InputSignal sig;
  for (const auto& ch : channels) {
    if (!ch.is_array() || ch.empty())
      throw ConfigError("each signal channel must be a non-empty term array");
    signal::ScalarSignal s = parse_term(ch[0]);
    for (std::size_t i = 1; i < ch.size(); ++i)
      s = signal::sum(s, parse_term(ch[i]));
    sig.channels.push_back(std::move(s));
  }
  return sig;
}

input::BasisSpec parse_basis(const json& j) {
  check_keys(j, {"kind", "degree"}, "basis");
  input::BasisSpec b;
  b.kind = input::basis_kind_from_string(j.at("kind").get<std::string>());
  b.degree = j.at("degree").get<int>();
  if (b.degree < 0) throw ConfigError("basis.degree must be >= 0");
  return b;
}

data::Interval parse_interval(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2)
    throw ConfigError(where + " must be a [lo, hi] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

data::SamplingDomains parse_domains(const json& j) {
  check_keys(j, {"x", "gamma", "delta", "extra"}, "domains");
  data::SamplingDomains d;
  for (const auto& iv : j.at("x")) d.x.push_back(parse_interval(iv, "domains.x"));
  for (const auto& row : j.at("gamma")) {
    std::vector<data::Interval> r;
    for (const auto& iv : row) r.push_back(parse_interval(iv, "domains.gamma"));
    d.gamma.push_back(std::move(r));
  }
  d.delta = parse_interval(j.at("delta"), "domains.delta");
  if (j.contains("extra"))
    for (const auto& iv : j.at("extra"))
      d.extra.push_back(parse_interval(iv, "domains.extra"));
  return d;
}

// Default sampling domains per system preset.
data::SamplingDomains default_domains(const std::string& preset) {
  std::string id;
  if (preset == "linear_scalar") id = "ex1";
  else if (preset == "predator_prey") id = "ex2";
  else if (preset == "forced_oscillator") id = "ex3";
  else if (preset == "heat22") id = "ex4";
  else throw ConfigError("no default domains for preset '" + preset + "'");
  return experiments::experiment(id).domains;
}

struct Scenario {
  Vec x0;
  signal::InputSignal sig;
  Vec extra;
  double T = 0.0;
  double delta = 0.1;
  int reference_micro = 50;
};

Scenario parse_scenario(const json& j) {
  check_keys(j, {"x0", "signal", "extra", "T", "delta", "reference_micro"},
             "prediction");
  Scenario s;
  const auto x0 = j.at("x0").get<std::vector<double>>();
  s.x0 = Eigen::Map<const Vec>(x0.data(), x0.size());
  s.sig = parse_signal(j.at("signal"));
  if (j.contains("extra")) {
    const auto e = j.at("extra").get<std::vector<double>>();
    s.extra = Eigen::Map<const Vec>(e.data(), e.size());
  } else {
    s.extra.resize(0);
  }
  s.T = j.at("T").get<double>();
  s.delta = j.value("delta", 0.1);
  s.reference_micro = j.value("reference_micro", 50);
  if (s.T <= 0.0 || s.delta <= 0.0)
    throw ConfigError("prediction.T and prediction.delta must be > 0");
  return s;
}

train::TrainConfig parse_train(const json& j, std::uint64_t seed) {
  train::TrainConfig cfg;
  cfg.seed = seed;
  if (j.is_null()) return cfg;
  check_keys(j,
             {"epochs", "batch_size", "learning_rate", "betas", "eps",
              "validation_fraction", "resume"},
             "train");
  cfg.epochs = j.value("epochs", cfg.epochs);
  cfg.batch_size = j.value("batch_size", cfg.batch_size);
  cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
  if (j.contains("betas")) {
    const auto b = j.at("betas").get<std::vector<double>>();
    if (b.size() != 2) throw ConfigError("train.betas must have 2 entries");
    cfg.beta1 = b[0];
    cfg.beta2 = b[1];
  }
  cfg.eps = j.value("eps", cfg.eps);
  cfg.validation_fraction =
      j.value("validation_fraction", cfg.validation_fraction);
  return cfg;
}

std::uint64_t config_seed(const json& cfg, const std::optional<std::uint64_t>& cli_seed) {
  if (cli_seed) return *cli_seed;
  return cfg.value("seed", std::uint64_t{0});
}

fs::path out_dir(const json& cfg, const std::string& cli_out) {
  fs::path dir = cli_out.empty() ? fs::path(cfg.value("out", ".")) : fs::path(cli_out);
  fs::create_directories(dir);
  return dir;
}

std::vector<double> scenario_grid(const Scenario& s) {
  const int n = static_cast<int>(std::round(s.T / s.delta));
  if (n < 1) throw ConfigError("prediction horizon shorter than one step");
  return roll::uniform_grid(0.0, s.T, n);
}

// ---------------------------------------------------------------- commands

int cmd_simulate(const json& cfg, const fs::path& out,
                 std::uint64_t /*seed*/) {
  const std::string preset = cfg.at("preset").get<std::string>();
  auto factory = experiments::system_factory(preset);
  Scenario s = parse_scenario(cfg.at("prediction"));
  const auto grid = scenario_grid(s);
  dynamics::Trajectory traj = experiments::reference_trajectory(
      factory, s.extra, s.x0, s.sig, grid, s.reference_micro);
  roll::write_trajectory_csv(traj, (out / "reference.csv").string());
  std::cout << "simulate: wrote " << traj.times.size() << " rows to "
            << (out / "reference.csv") << "\n";
  return 0;
}

int cmd_gen_data(const json& cfg, const fs::path& out, std::uint64_t seed) {
  const std::string preset = cfg.at("preset").get<std::string>();
  auto factory = experiments::system_factory(preset);
  input::BasisSpec basis = cfg.contains("basis")
                               ? parse_basis(cfg.at("basis"))
                               : input::BasisSpec{};
  data::SamplingDomains domains = cfg.contains("domains")
                                      ? parse_domains(cfg.at("domains"))
                                      : default_domains(preset);
  int J = 20000;
  int micro_steps = 10;
  bool include_delta = true;
  double noise_std = 0.0;
  if (cfg.contains("dataset")) {
    const json& dj = cfg.at("dataset");
    check_keys(dj, {"J", "micro_steps", "include_delta", "noise_std"},
               "dataset");
    J = dj.value("J", J);
    micro_steps = dj.value("micro_steps", micro_steps);
    include_delta = dj.value("include_delta", include_delta);
    noise_std = dj.value("noise_std", noise_std);
  }
  auto inputs = data::sample_inputs(domains, J, seed);
  data::TrainingSet set =
      data::generate_pairs(factory, inputs, basis, micro_steps, include_delta);
  set.domains = domains;
  set.seed = seed;
  if (noise_std > 0.0) set = data::noise_inject(set, noise_std, seed + 1);
  data::save(set, (out / "dataset.csv").string(),
             (out / "dataset.json").string());
  std::cout << "gen-data: " << set.samples.size() << " samples ("
            << set.meta.dropped << " dropped) -> " << (out / "dataset.csv")
            << "\n";
  return 0;
}

int cmd_train(const json& cfg, const fs::path& out, std::uint64_t seed) {
  data::TrainingSet set = data::load((out / "dataset.csv").string(),
                                     (out / "dataset.json").string());
  const json& mj = cfg.at("model");
  check_keys(mj, {"kind", "hidden", "degree"}, "model");
  const std::string kind = mj.at("kind").get<std::string>();
  if (kind == "network") {
    net::NetParams params;
    if (cfg.contains("train") && cfg.at("train").contains("resume")) {
      params = net::load_checkpoint(
                   cfg.at("train").at("resume").get<std::string>())
                   .params;
    } else {
      std::vector<int> sizes{set.input_dim()};
      for (int h : mj.value("hidden", std::vector<int>{80, 80, 80}))
        sizes.push_back(h);
      sizes.push_back(set.d);
      params = net::init_params(sizes, seed);
    }
    train::TrainConfig tcfg =
        parse_train(cfg.contains("train") ? cfg.at("train") : json(), seed);
    train::TrainReport report = train::train(params, set, tcfg);
    net::NetworkModel model{report.final_params, layout_of(set), set.input_lo,
                            set.input_hi};
    net::save_checkpoint(model, (out / "checkpoint.json").string());
    train::write_loss_csv(report, (out / "loss.csv").string());
    std::cout << "train: final train MSE = "
              << (report.loss_history.empty() ? 0.0
                                              : report.loss_history.back())
              << " -> " << (out / "checkpoint.json") << "\n";
    return 0;
  }
  if (kind == "polynomial") {
    const int degree = mj.at("degree").get<int>();
    poly::FitInfo info;
    poly::PolyModel model = poly::fit(set, degree, &info);
    poly::save_checkpoint(model, (out / "checkpoint.json").string());
    json j = {{"degree", degree},
              {"n_features", info.n_features},
              {"rank", info.rank},
              {"residual_rms", info.residual_rms}};
    std::ofstream fo(out / "fit.json");
    fo << j.dump(2) << "\n";
    std::cout << "train: polynomial degree " << degree << ", residual RMS "
              << info.residual_rms << " -> " << (out / "checkpoint.json")
              << "\n";
    return 0;
  }
  throw ConfigError("model.kind must be 'network' or 'polynomial'");
}

std::unique_ptr<roll::OneStepModel> load_model(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open checkpoint " + path.string());
  json j;
  in >> j;
  const std::string type = j.at("type").get<std::string>();
  if (type == "network")
    return std::make_unique<roll::NetworkStepModel>(
        net::load_checkpoint(path.string()));
  if (type == "polynomial")
    return std::make_unique<roll::PolyStepModel>(
        poly::load_checkpoint(path.string()));
  throw ConfigError("unknown checkpoint type '" + type + "'");
}

int cmd_predict(const json& cfg, const fs::path& out, std::uint64_t /*seed*/) {
  auto model = load_model(out / "checkpoint.json");
  Scenario s = parse_scenario(cfg.at("prediction"));
  const auto grid = scenario_grid(s);
  roll::PredictionRun run =
      roll::predict(*model, s.x0, s.sig, grid, s.extra);
  roll::write_trajectory_csv(run.predicted, (out / "prediction.csv").string());
  if (run.failed) {
    std::cerr << "predict: non-finite state at step " << run.failure_index
              << "; truncated run written\n";
    return 1;
  }
  int warnings = 0;
  for (char w : run.out_of_domain) warnings += w;
  if (warnings > 0)
    std::cerr << "predict: " << warnings
              << " step(s) left the training domain box\n";

  std::string preset = cfg.value("preset", model->layout().system);
  const auto presets = dynamics::preset_names();
  if (std::find(presets.begin(), presets.end(), preset) != presets.end()) {
    auto factory = experiments::system_factory(preset);
    dynamics::Trajectory ref = experiments::reference_trajectory(
        factory, s.extra, s.x0, s.sig, grid, s.reference_micro);
    roll::write_trajectory_csv(ref, (out / "reference.csv").string());
    roll::CompareMetrics m = roll::compare(run.predicted, ref);
    roll::write_metrics_json(m, (out / "metrics.json").string());
    std::cout << "predict: Linf = " << m.linf << ", relative Linf = "
              << m.rel_linf << "\n";
  } else {
    std::cout << "predict: wrote " << run.predicted.times.size() << " rows\n";
  }
  return 0;
}

int cmd_bounds(const json& cfg, const fs::path& out, std::uint64_t seed) {
  const json& bj = cfg.at("bounds");
  const std::string mode = bj.at("mode").get<std::string>();
  if (mode == "calculator") {
    check_keys(bj, {"mode", "entries"}, "bounds");
    json results = json::array();
    for (const auto& e : bj.at("entries")) {
      check_keys(e, {"L1", "L2", "eta", "L_phi", "E", "delta", "n", "t"},
                 "bounds entry");
      analysis::BoundInputs in;
      in.L1 = e.value("L1", 0.0);
      in.L2 = e.value("L2", 0.0);
      in.eta = e.value("eta", 0.0);
      in.L_phi = e.value("L_phi", 0.0);
      in.E = e.value("E", 0.0);
      in.delta = e.value("delta", 0.0);
      in.n = e.value("n", 0);
      in.t = e.value("t", 0.0);
      results.push_back(
          {{"input_bound", analysis::input_bound(in.L1, in.L2, in.eta, in.t)},
           {"rollout_bound", analysis::rollout_bound(in.L_phi, in.E, in.n)},
           {"appendix_bound",
            analysis::appendix_bound(in.L1, in.delta, in.n, in.E)},
           {"combined_bound", analysis::combined_bound(in)}});
    }
    std::ofstream fo(out / "bounds.json");
    fo << results.dump(2) << "\n";
    std::cout << "bounds: calculator table with " << results.size()
              << " entries\n";
    return 0;
  }
  if (mode == "gronwall") {
    check_keys(bj, {"mode", "preset", "L1", "L2", "basis", "T", "delta", "x0",
                    "signal"},
               "bounds");
    dynamics::SystemSpec sys =
        dynamics::preset(bj.value("preset", std::string("linear_scalar")));
    sys.lipschitz = dynamics::Lipschitz{bj.at("L1").get<double>(),
                                        bj.at("L2").get<double>()};
    const auto x0v = bj.at("x0").get<std::vector<double>>();
    Vec x0 = Eigen::Map<const Vec>(x0v.data(), x0v.size());
    signal::InputSignal sig = parse_signal(bj.at("signal"));
    input::BasisSpec basis = parse_basis(bj.at("basis"));
    analysis::GronwallReport rep = analysis::check_gronwall(
        sys, sig, basis, x0, bj.at("T").get<double>(),
        bj.value("delta", 0.1));
    analysis::write_gronwall_json(rep, (out / "bounds.json").string());
    std::cout << "bounds: gronwall check "
              << (rep.satisfied ? "PASS" : "FAIL") << " (eta = " << rep.eta
              << ")\n";
    return rep.satisfied ? 0 : 1;
  }
  if (mode == "rollout") {
    check_keys(bj, {"mode", "preset", "basis", "T", "delta", "x0", "signal",
                    "E", "L_phi", "adversarial", "micro_steps"},
               "bounds");
    const std::string preset = bj.value("preset", std::string("linear_scalar"));
    auto factory = experiments::system_factory(preset);
    input::BasisSpec basis = parse_basis(bj.at("basis"));
    const auto x0v = bj.at("x0").get<std::vector<double>>();
    Vec x0 = Eigen::Map<const Vec>(x0v.data(), x0v.size());
    signal::InputSignal sig = parse_signal(bj.at("signal"));
    const double delta = bj.value("delta", 0.1);
    const double T = bj.at("T").get<double>();
    const int n = static_cast<int>(std::round(T / delta));
    ModelLayout layout;
    dynamics::SystemSpec probe = factory(Vec());
    layout.d = probe.d;
    layout.input_arity = probe.input_arity;
    layout.n_b = basis.n_b();
    layout.n_extra = 0;
    layout.basis = basis;
    layout.system = preset;
    roll::ExactStepModel oracle(factory, layout, bj.value("micro_steps", 10));
    double L_phi;
    if (bj.contains("L_phi")) {
      L_phi = bj.at("L_phi").get<double>();
    } else {
      std::vector<data::Interval> box(probe.d, {-2.0, 2.0});
      input::LocalInputParams p0 = input::fit_local(sig, 0.0, delta, basis);
      L_phi = analysis::estimate_lphi(oracle, box, p0.coeffs, delta, Vec());
    }
    analysis::RolloutBoundReport rep = analysis::check_rollout_bound(
        oracle, x0, sig, roll::uniform_grid(0.0, T, n),
        bj.at("E").get<double>(), L_phi, seed,
        bj.value("adversarial", false));
    analysis::write_rollout_bound_json(rep, (out / "bounds.json").string());
    std::cout << "bounds: rollout check "
              << (rep.satisfied ? "PASS" : "FAIL") << " (L_phi = " << L_phi
              << ")\n";
    return rep.satisfied ? 0 : 1;
  }
  throw ConfigError("bounds.mode must be gronwall|rollout|calculator");
}

int cmd_bench(const std::string& id, const fs::path& out, std::uint64_t seed) {
  experiments::Experiment e = experiments::experiment(id);
  auto factory = experiments::system_factory(e.preset);
  std::cout << "bench " << id << ": sampling " << e.J << " inputs\n";
  auto inputs = data::sample_inputs(e.domains, e.J, seed);
  data::TrainingSet set = data::generate_pairs(factory, inputs, e.basis,
                                               e.micro_steps, e.include_delta);
  set.domains = e.domains;
  set.seed = seed;
  data::save(set, (out / "dataset.csv").string(),
             (out / "dataset.json").string());

  const int n_steps = static_cast<int>(std::round(e.T / e.delta));
  const auto grid = roll::uniform_grid(0.0, e.T, n_steps);
  dynamics::Trajectory ref = experiments::reference_trajectory(
      factory, e.extra, e.x0, e.sig, grid, e.reference_micro);
  roll::write_trajectory_csv(ref, (out / "reference.csv").string());

  json summary;
  summary["experiment"] = id;
  summary["J"] = set.samples.size();

  if (id == "ex1_poly") {
    std::ofstream sweep(out / "degree_sweep.csv");
    sweep << "degree,rel_linf,terminal_rel\n";
    double last_rel = 0.0;
    for (int p = 1; p <= 5; ++p) {
      poly::FitInfo info;
      poly::PolyModel model = poly::fit(set, p, &info);
      if (p == e.poly_degree)
        poly::save_checkpoint(model, (out / "checkpoint.json").string());
      roll::PolyStepModel step(model);
      roll::PredictionRun run = roll::predict(step, e.x0, e.sig, grid, e.extra);
      roll::CompareMetrics m = roll::compare(run.predicted, ref);
      double ref_mag = 0.0;
      for (const auto& s : ref.states)
        ref_mag = std::max(ref_mag, s.cwiseAbs().maxCoeff());
      const double terminal_rel = m.terminal / std::max(ref_mag, 1e-12);
      char buf[96];
      std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", p, m.rel_linf,
                    terminal_rel);
      sweep << buf;
      std::cout << "  degree " << p << ": rel Linf = " << m.rel_linf
                << ", terminal rel = " << terminal_rel << "\n";
      last_rel = m.rel_linf;
    }
    summary["rel_linf_degree5"] = last_rel;
  } else {
    std::vector<int> sizes{set.input_dim()};
    for (int h : e.hidden) sizes.push_back(h);
    sizes.push_back(set.d);
    net::NetParams params = net::init_params(sizes, seed);
    int total_epochs = e.tcfg.epochs;
    if (!e.stages.empty()) {
      total_epochs = 0;
      for (const auto& st : e.stages) total_epochs += st.epochs;
    }
    std::cout << "bench " << id << ": training " << total_epochs
              << " epochs\n";
    train::TrainReport report = experiments::train_network(params, set, e, seed);
    net::NetworkModel model{report.final_params, layout_of(set), set.input_lo,
                            set.input_hi};
    net::save_checkpoint(model, (out / "checkpoint.json").string());
    train::write_loss_csv(report, (out / "loss.csv").string());
    summary["final_train_mse"] = report.loss_history.back();

    roll::NetworkStepModel step(model);
    roll::PredictionRun run = roll::predict(step, e.x0, e.sig, grid, e.extra);
    roll::write_trajectory_csv(run.predicted,
                               (out / "prediction.csv").string());
    if (run.failed) {
      std::cerr << "bench: prediction diverged at step " << run.failure_index
                << "\n";
      return 1;
    }
    roll::CompareMetrics m = roll::compare(run.predicted, ref);
    roll::write_metrics_json(m, (out / "metrics.json").string());
    summary["linf"] = m.linf;
    summary["rel_linf"] = m.rel_linf;
    std::cout << "bench " << id << ": Linf = " << m.linf
              << ", relative Linf = " << m.rel_linf << "\n";
  }
  std::ofstream so(out / "summary.json");
  so << summary.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flowmap: learn non-autonomous dynamics via one-step flow maps"};
  app.require_subcommand(1);

  std::string config_path, out_override, bench_id;
  std::optional<std::uint64_t> seed_override;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", config_path, "JSON config file");
    if (needs_config) opt->required();
    sub->add_option("--out", out_override, "output directory");
    sub->add_option("--seed", seed_override, "RNG seed override");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "reference trajectory");
  CLI::App* gen_data = app.add_subcommand("gen-data", "training set");
  CLI::App* train_cmd = app.add_subcommand("train", "fit a one-step model");
  CLI::App* predict = app.add_subcommand("predict", "recursive prediction");
  CLI::App* bounds = app.add_subcommand("bounds", "error-bound checks");
  CLI::App* bench = app.add_subcommand("bench", "paper-configuration pipeline");
  for (CLI::App* sub : {simulate, gen_data, train_cmd, predict, bounds})
    add_common(sub, true);
  bench->add_option("id", bench_id, "experiment id (ex1, ex1_poly, ex2, ex3, ex4)")
      ->required();
  add_common(bench, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (bench->parsed()) {
      fs::path dir = out_override.empty() ? fs::path(bench_id) : fs::path(out_override);
      fs::create_directories(dir);
      return cmd_bench(bench_id, dir, seed_override.value_or(2024));
    }
    const json cfg = load_config(config_path);
    const fs::path dir = out_dir(cfg, out_override);
    const std::uint64_t seed = config_seed(cfg, seed_override);
    if (simulate->parsed()) return cmd_simulate(cfg, dir, seed);
    if (gen_data->parsed()) return cmd_gen_data(cfg, dir, seed);
    if (train_cmd->parsed()) return cmd_train(cfg, dir, seed);
    if (predict->parsed()) return cmd_predict(cfg, dir, seed);
    if (bounds->parsed()) return cmd_bounds(cfg, dir, seed);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const dynamics::ContractViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numeric/runtime failure: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
