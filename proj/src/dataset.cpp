#include "flowmap/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "flowmap/rng.hpp"

namespace flowmap::data {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void check_interval(const Interval& iv, const char* what) {
  if (!(iv.lo <= iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi)) {
    std::ostringstream os;
    os << "SamplingDomains: invalid " << what << " interval [" << iv.lo << ", "
       << iv.hi << "]";
    throw dynamics::ContractViolation(os.str());
  }
}

void update_box(Vec& lo, Vec& hi, const Vec& v) {
  if (lo.size() == 0) {
    lo = v;
    hi = v;
  } else {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
}

void finalize_box(TrainingSet& set) {
  set.input_lo.resize(0);
  set.input_hi.resize(0);
  for (const auto& s : set.samples) {
    update_box(set.input_lo, set.input_hi,
               assemble_input(s.x_in, s.gamma, s.delta, s.extra,
                              set.meta.include_delta));
  }
}

}  // namespace

void SamplingDomains::validate() const {
  for (const auto& iv : x) check_interval(iv, "state");
  for (const auto& row : gamma)
    for (const auto& iv : row) check_interval(iv, "gamma");
  check_interval(delta, "delta");
  if (delta.lo <= 0.0)
    throw dynamics::ContractViolation(
        "SamplingDomains: delta interval must be positive");
  for (const auto& iv : extra) check_interval(iv, "extra");
}

Vec assemble_input(const Vec& x, const Mat& gamma, double delta,
                   const Vec& extra, bool include_delta) {
  const int d = static_cast<int>(x.size());
  const int g = static_cast<int>(gamma.size());
  const int e = static_cast<int>(extra.size());
  Vec out(d + g + e + (include_delta ? 1 : 0));
  out.head(d) = x;
  int pos = d;
  for (int r = 0; r < gamma.rows(); ++r)
    for (int c = 0; c < gamma.cols(); ++c) out[pos++] = gamma(r, c);
  out.segment(pos, e) = extra;
  pos += e;
  if (include_delta) out[pos] = delta;
  return out;
}

std::vector<SampledInput> sample_inputs(const SamplingDomains& domains, int J,
                                        std::uint64_t seed) {
  if (J < 1) throw dynamics::ContractViolation("sample_inputs: J must be >= 1");
  domains.validate();
  const int d = static_cast<int>(domains.x.size());
  const int arity = static_cast<int>(domains.gamma.size());
  const int n_b = arity > 0 ? static_cast<int>(domains.gamma[0].size()) : 0;
  const int n_extra = static_cast<int>(domains.extra.size());
  std::vector<SampledInput> out(J);
  for (int j = 0; j < J; ++j) {
    auto g = rng::stream(seed, static_cast<std::uint64_t>(j));
    SampledInput& s = out[j];
    s.x.resize(d);
    for (int i = 0; i < d; ++i)
      s.x[i] = g.uniform(domains.x[i].lo, domains.x[i].hi);
    s.gamma.resize(arity, n_b);
    for (int r = 0; r < arity; ++r)
      for (int c = 0; c < n_b; ++c)
        s.gamma(r, c) = g.uniform(domains.gamma[r][c].lo, domains.gamma[r][c].hi);
    s.delta = g.uniform(domains.delta.lo, domains.delta.hi);
    s.extra.resize(n_extra);
    for (int i = 0; i < n_extra; ++i)
      s.extra[i] = g.uniform(domains.extra[i].lo, domains.extra[i].hi);
  }
  return out;
}

int worker_count() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("FLOWMAP_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, cap);
  }
  return n;
}

TrainingSet generate_pairs(const SystemFactory& factory,
                           const std::vector<SampledInput>& inputs,
                           const input::BasisSpec& basis, int micro_steps,
                           bool include_delta) {
  if (micro_steps < 1)
    throw dynamics::ContractViolation("generate_pairs: micro_steps must be >= 1");
  if (inputs.empty())
    throw dynamics::ContractViolation("generate_pairs: no inputs");

  const int J = static_cast<int>(inputs.size());
  std::vector<TrainingSample> results(J);
  std::vector<char> ok(J, 0);

  auto work = [&](int begin, int end) {
    for (int j = begin; j < end; ++j) {
      const SampledInput& in = inputs[j];
      dynamics::SystemSpec sys = factory(in.extra);
      input::LocalInputParams local;
      local.coeffs = in.gamma;
      local.delta = in.delta;
      local.basis = basis;
      dynamics::TimeSignal sig = [&local](double tau) {
        return input::eval_local(local, tau);
      };
      int steps = micro_steps;
      if (sys.max_step)
        steps = std::max(steps,
                         static_cast<int>(std::ceil(in.delta / *sys.max_step)));
      try {
        dynamics::Trajectory traj =
            dynamics::integrate(sys, in.x, 0.0, in.delta, steps, sig);
        TrainingSample& s = results[j];
        s.x_in = in.x;
        s.gamma = in.gamma;
        s.delta = in.delta;
        s.extra = in.extra;
        s.x_out = traj.states.back();
        ok[j] = 1;
      } catch (const dynamics::NumericOverflow&) {
        ok[j] = 0;
      }
    }
  };

  const int workers = std::min(worker_count(), J);
  if (workers <= 1) {
    work(0, J);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (J + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int begin = w * chunk;
      const int end = std::min(J, begin + chunk);
      if (begin < end) pool.emplace_back(work, begin, end);
    }
    for (auto& t : pool) t.join();
  }

  TrainingSet set;
  dynamics::SystemSpec probe = factory(inputs[0].extra);
  set.meta.system = probe.name;
  set.meta.basis = basis;
  set.meta.micro_steps = micro_steps;
  set.meta.include_delta = include_delta;
  set.d = probe.d;
  set.input_arity = probe.input_arity;
  set.n_b = basis.n_b();
  set.n_extra = static_cast<int>(inputs[0].extra.size());
  for (int j = 0; j < J; ++j) {
    if (ok[j])
      set.samples.push_back(std::move(results[j]));
    else
      ++set.meta.dropped;
  }
  if (set.samples.empty())
    throw dynamics::NumericOverflow("generate_pairs: every sample overflowed");
  finalize_box(set);
  return set;
}

TrainingSet generate_pairs(const dynamics::SystemSpec& system,
                           const std::vector<SampledInput>& inputs,
                           const input::BasisSpec& basis, int micro_steps,
                           bool include_delta) {
  return generate_pairs(
      [&system](const Vec&) { return system; }, inputs, basis, micro_steps,
      include_delta);
}

TrainingSet pairs_from_trajectories(
    const std::vector<std::pair<dynamics::Trajectory, signal::InputSignal>>&
        trajs,
    const input::BasisSpec& basis) {
  TrainingSet set;
  set.meta.system = "trajectories";
  set.meta.basis = basis;
  set.n_b = basis.n_b();
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    const auto& [traj, sig] = trajs[i];
    if (traj.times.size() < 2) {
      std::ostringstream os;
      os << "pairs_from_trajectories: trajectory " << i
         << " has fewer than 2 points";
      throw dynamics::ContractViolation(os.str());
    }
    set.d = static_cast<int>(traj.states[0].size());
    set.input_arity = sig.arity();
    for (std::size_t k = 0; k + 1 < traj.times.size(); ++k) {
      const double t_k = traj.times[k];
      const double delta = traj.times[k + 1] - t_k;
      input::LocalInputParams local = input::fit_local(sig, t_k, delta, basis);
      TrainingSample s;
      s.x_in = traj.states[k];
      s.gamma = local.coeffs;
      s.delta = delta;
      s.extra.resize(0);
      s.x_out = traj.states[k + 1];
      set.samples.push_back(std::move(s));
    }
  }
  if (set.samples.empty())
    throw dynamics::ContractViolation("pairs_from_trajectories: no samples");
  finalize_box(set);
  return set;
}

TrainingSet noise_inject(const TrainingSet& set, double std_dev,
                         std::uint64_t seed) {
  if (std_dev < 0.0)
    throw dynamics::ContractViolation("noise_inject: std must be >= 0");
  if (std_dev == 0.0) return set;
  TrainingSet out = set;
  for (std::size_t j = 0; j < out.samples.size(); ++j) {
    auto g = rng::stream(seed, j);
    auto& s = out.samples[j];
    for (int i = 0; i < s.x_in.size(); ++i) s.x_in[i] += std_dev * g.gaussian();
    for (int i = 0; i < s.x_out.size(); ++i)
      s.x_out[i] += std_dev * g.gaussian();
  }
  finalize_box(out);
  return out;
}

namespace {

nlohmann::json interval_json(const Interval& iv) {
  return nlohmann::json::array({iv.lo, iv.hi});
}

Interval interval_from_json(const nlohmann::json& j) {
  return Interval{j.at(0).get<double>(), j.at(1).get<double>()};
}

}  // namespace

void save(const TrainingSet& set, const std::string& csv_path,
          const std::string& json_path) {
  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot open " + csv_path);
  for (int i = 0; i < set.d; ++i) csv << (i ? "," : "") << "x_" << i;
  for (int i = 0; i < set.input_arity * set.n_b; ++i) csv << ",g_" << i;
  for (int i = 0; i < set.n_extra; ++i) csv << ",e_" << i;
  csv << ",delta";
  for (int i = 0; i < set.d; ++i) csv << ",y_" << i;
  csv << "\n";
  for (const auto& s : set.samples) {
    for (int i = 0; i < set.d; ++i) csv << (i ? "," : "") << fmt17(s.x_in[i]);
    for (int r = 0; r < s.gamma.rows(); ++r)
      for (int c = 0; c < s.gamma.cols(); ++c) csv << "," << fmt17(s.gamma(r, c));
    for (int i = 0; i < set.n_extra; ++i) csv << "," << fmt17(s.extra[i]);
    csv << "," << fmt17(s.delta);
    for (int i = 0; i < set.d; ++i) csv << "," << fmt17(s.x_out[i]);
    csv << "\n";
  }

  nlohmann::json j;
  j["system"] = set.meta.system;
  j["basis"] = {{"kind", input::to_string(set.meta.basis.kind)},
                {"degree", set.meta.basis.degree}};
  j["micro_steps"] = set.meta.micro_steps;
  j["include_delta"] = set.meta.include_delta;
  j["dropped"] = set.meta.dropped;
  j["seed"] = set.seed;
  j["d"] = set.d;
  j["input_arity"] = set.input_arity;
  j["n_b"] = set.n_b;
  j["n_extra"] = set.n_extra;
  j["J"] = set.samples.size();
  nlohmann::json dom;
  dom["x"] = nlohmann::json::array();
  for (const auto& iv : set.domains.x) dom["x"].push_back(interval_json(iv));
  dom["gamma"] = nlohmann::json::array();
  for (const auto& row : set.domains.gamma) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& iv : row) r.push_back(interval_json(iv));
    dom["gamma"].push_back(r);
  }
  dom["delta"] = interval_json(set.domains.delta);
  dom["extra"] = nlohmann::json::array();
  for (const auto& iv : set.domains.extra)
    dom["extra"].push_back(interval_json(iv));
  j["domains"] = dom;
  j["input_box"] = {
      {"lo", std::vector<double>(set.input_lo.data(),
                                 set.input_lo.data() + set.input_lo.size())},
      {"hi", std::vector<double>(set.input_hi.data(),
                                 set.input_hi.data() + set.input_hi.size())}};
  std::ofstream js(json_path);
  if (!js) throw std::runtime_error("cannot open " + json_path);
  js << j.dump(2) << "\n";
}

TrainingSet load(const std::string& csv_path, const std::string& json_path) {
  std::ifstream js(json_path);
  if (!js) throw std::runtime_error("cannot open " + json_path);
  nlohmann::json j;
  js >> j;

  TrainingSet set;
  set.meta.system = j.at("system").get<std::string>();
  set.meta.basis.kind =
      input::basis_kind_from_string(j.at("basis").at("kind").get<std::string>());
  set.meta.basis.degree = j.at("basis").at("degree").get<int>();
  set.meta.micro_steps = j.at("micro_steps").get<int>();
  set.meta.include_delta = j.at("include_delta").get<bool>();
  set.meta.dropped = j.at("dropped").get<int>();
  set.seed = j.at("seed").get<std::uint64_t>();
  set.d = j.at("d").get<int>();
  set.input_arity = j.at("input_arity").get<int>();
  set.n_b = j.at("n_b").get<int>();
  set.n_extra = j.at("n_extra").get<int>();
  const auto& dom = j.at("domains");
  for (const auto& iv : dom.at("x")) set.domains.x.push_back(interval_from_json(iv));
  for (const auto& row : dom.at("gamma")) {
    std::vector<Interval> r;
    for (const auto& iv : row) r.push_back(interval_from_json(iv));
    set.domains.gamma.push_back(std::move(r));
  }
  set.domains.delta = interval_from_json(dom.at("delta"));
  for (const auto& iv : dom.at("extra"))
    set.domains.extra.push_back(interval_from_json(iv));

  std::ifstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot open " + csv_path);
  std::string line;
  std::getline(csv, line);  // header
  const int g_total = set.input_arity * set.n_b;
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ls, cell, ',')) vals.push_back(std::strtod(cell.c_str(), nullptr));
    const std::size_t expect =
        static_cast<std::size_t>(2 * set.d + g_total + set.n_extra + 1);
    if (vals.size() != expect) {
      std::ostringstream os;
      os << "dataset CSV row has " << vals.size() << " fields, expected "
         << expect;
      throw std::runtime_error(os.str());
    }
    TrainingSample s;
    int pos = 0;
    s.x_in.resize(set.d);
    for (int i = 0; i < set.d; ++i) s.x_in[i] = vals[pos++];
    s.gamma.resize(set.input_arity, set.n_b);
    for (int r = 0; r < set.input_arity; ++r)
      for (int c = 0; c < set.n_b; ++c) s.gamma(r, c) = vals[pos++];
    s.extra.resize(set.n_extra);
    for (int i = 0; i < set.n_extra; ++i) s.extra[i] = vals[pos++];
    s.delta = vals[pos++];
    s.x_out.resize(set.d);
    for (int i = 0; i < set.d; ++i) s.x_out[i] = vals[pos++];
    set.samples.push_back(std::move(s));
  }
  finalize_box(set);
  return set;
}

}  // namespace flowmap::data
