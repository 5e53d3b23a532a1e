#pragma once

#include <Eigen/Core>
#include <memory>
#include <string>
#include <vector>

#include "flowmap/flownet.hpp"
#include "flowmap/poly_model.hpp"

namespace flowmap::roll {

using Vec = Eigen::VectorXd;

// A one-step predictor with the residual structure: network, polynomial, or
// an exact-increment oracle backed by reference integration.
class OneStepModel {
 public:
  virtual ~OneStepModel() = default;
  virtual const ModelLayout& layout() const = 0;
  // X_in is the assembled model input; delta is passed separately so
  // fixed-step layouts (delta excluded from X_in) still work.
  virtual Vec step(const Vec& X_in, double delta,
                   bool* out_of_domain = nullptr) const = 0;
};

class NetworkStepModel final : public OneStepModel {
 public:
  explicit NetworkStepModel(net::NetworkModel model);
  const ModelLayout& layout() const override { return model_.layout; }
  Vec step(const Vec& X_in, double delta,
           bool* out_of_domain) const override;

 private:
  net::NetworkModel model_;
};

class PolyStepModel final : public OneStepModel {
 public:
  explicit PolyStepModel(poly::PolyModel model);
  const ModelLayout& layout() const override { return model_.layout; }
  Vec step(const Vec& X_in, double delta,
           bool* out_of_domain) const override;

 private:
  poly::PolyModel model_;
};

// Integrates the true local system over one step; the testing oracle.
class ExactStepModel final : public OneStepModel {
 public:
  ExactStepModel(data::SystemFactory factory, ModelLayout layout,
                 int micro_steps = 10);
  ExactStepModel(const dynamics::SystemSpec& system, ModelLayout layout,
                 int micro_steps = 10);
  const ModelLayout& layout() const override { return layout_; }
  Vec step(const Vec& X_in, double delta,
           bool* out_of_domain) const override;

 private:
  data::SystemFactory factory_;
  ModelLayout layout_;
  int micro_steps_;
};

struct PredictionRun {
  dynamics::Trajectory predicted;
  input::PiecewiseInput fitted_inputs;
  std::vector<char> out_of_domain;  // one flag per executed step
  bool failed = false;
  std::size_t failure_index = 0;  // valid when failed
};

// Recursive prediction over the grid; fits the signal with the model's own
// basis on every interval.
PredictionRun predict(const OneStepModel& model, const Vec& x0,
                      const signal::InputSignal& sig,
                      const std::vector<double>& grid,
                      const Vec& extra = Vec());

std::vector<double> uniform_grid(double t0, double t1, int n_steps);

struct CompareMetrics {
  std::vector<double> abs_error;    // per time point, max over coordinates
  Vec per_coord_linf;               // per state coordinate
  double linf = 0.0;
  double rel_linf = 0.0;
  double terminal = 0.0;
};

CompareMetrics compare(const dynamics::Trajectory& pred,
                       const dynamics::Trajectory& ref);

void write_trajectory_csv(const dynamics::Trajectory& traj,
                          const std::string& path);
void write_metrics_json(const CompareMetrics& metrics, const std::string& path);

}  // namespace flowmap::roll
