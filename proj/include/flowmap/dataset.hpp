#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "flowmap/dynamics.hpp"
#include "flowmap/input_param.hpp"

namespace flowmap::data {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct SamplingDomains {
  std::vector<Interval> x;                  // per state coordinate
  std::vector<std::vector<Interval>> gamma;  // input_arity x n_b
  Interval delta;
  std::vector<Interval> extra;  // constant parameters appended to the input

  void validate() const;
};

struct SampledInput {
  Vec x;
  Mat gamma;  // input_arity x n_b
  double delta = 0.0;
  Vec extra;
};

struct TrainingSample {
  Vec x_in;
  Mat gamma;
  double delta = 0.0;
  Vec extra;
  Vec x_out;
};

struct DatasetMeta {
  std::string system;
  input::BasisSpec basis;
  int micro_steps = 10;
  bool include_delta = true;
  int dropped = 0;
};

struct TrainingSet {
  std::vector<TrainingSample> samples;
  SamplingDomains domains;
  std::uint64_t seed = 0;
  DatasetMeta meta;
  int d = 0;
  int input_arity = 0;
  int n_b = 0;
  int n_extra = 0;
  // Per-coordinate min/max of the assembled model inputs (convex-hull box
  // record used for normalization and out-of-domain warnings).
  Vec input_lo, input_hi;

  int input_dim() const {
    return d + input_arity * n_b + n_extra + (meta.include_delta ? 1 : 0);
  }
  std::size_t size() const { return samples.size(); }
};

// Concatenation [x; gamma row-major; extra; delta] (delta omitted in
// fixed-step mode).
Vec assemble_input(const Vec& x, const Mat& gamma, double delta,
                   const Vec& extra, bool include_delta = true);

std::vector<SampledInput> sample_inputs(const SamplingDomains& domains, int J,
                                        std::uint64_t seed);

using SystemFactory =
    std::function<dynamics::SystemSpec(const Vec& extra)>;

TrainingSet generate_pairs(const dynamics::SystemSpec& system,
                           const std::vector<SampledInput>& inputs,
                           const input::BasisSpec& basis, int micro_steps,
                           bool include_delta = true);

// For systems whose right-hand side depends on the sampled extra constants.
TrainingSet generate_pairs(const SystemFactory& factory,
                           const std::vector<SampledInput>& inputs,
                           const input::BasisSpec& basis, int micro_steps,
                           bool include_delta = true);

TrainingSet pairs_from_trajectories(
    const std::vector<std::pair<dynamics::Trajectory, signal::InputSignal>>&
        trajs,
    const input::BasisSpec& basis);

TrainingSet noise_inject(const TrainingSet& set, double std_dev,
                         std::uint64_t seed);

void save(const TrainingSet& set, const std::string& csv_path,
          const std::string& json_path);
TrainingSet load(const std::string& csv_path, const std::string& json_path);

// Worker count: min(hardware, FLOWMAP_THREADS), at least 1.
int worker_count();

}  // namespace flowmap::data
