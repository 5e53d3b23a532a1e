#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

namespace flowmap::signal {

// One scalar input channel. `derivative(t, order)` is optional; when absent,
// consumers that need derivatives (Taylor fits) fall back to finite
// differences.
struct ScalarSignal {
  std::function<double(double)> value;
  std::function<double(double, int)> derivative;  // order >= 1
};

struct InputSignal {
  std::vector<ScalarSignal> channels;

  int arity() const { return static_cast<int>(channels.size()); }

  Eigen::VectorXd operator()(double t) const {
    Eigen::VectorXd v(channels.size());
    for (std::size_t c = 0; c < channels.size(); ++c)
      v[static_cast<int>(c)] = channels[c].value(t);
    return v;
  }
};

ScalarSignal constant(double c);
ScalarSignal linear(double slope, double offset = 0.0);
// amp * sin(freq * t + phase) + offset
ScalarSignal sinusoid(double amp, double freq, double phase = 0.0,
                      double offset = 0.0);
ScalarSignal cosine(double amp, double freq, double offset = 0.0);
// cos(t^2 / scale); no analytic derivative supplied.
ScalarSignal chirp_cos(double scale);
// amp * (t/period - floor(t/period))
ScalarSignal sawtooth(double period = 1.0, double amp = 1.0);
// c[0] + c[1] t + c[2] t^2 + ... with exact derivatives.
ScalarSignal polynomial(std::vector<double> coeffs);
ScalarSignal sum(ScalarSignal a, ScalarSignal b);

}  // namespace flowmap::signal
