#include "flowmap/signal.hpp"

#include <cmath>

namespace flowmap::signal {

namespace {
constexpr double kHalfPi = 1.5707963267948966;
}

ScalarSignal constant(double c) {
  ScalarSignal s;
  s.value = [c](double) { return c; };
  s.derivative = [](double, int) { return 0.0; };
  return s;
}

ScalarSignal linear(double slope, double offset) {
  ScalarSignal s;
  s.value = [slope, offset](double t) { return slope * t + offset; };
  s.derivative = [slope](double, int order) {
    return order == 1 ? slope : 0.0;
  };
  return s;
}

ScalarSignal sinusoid(double amp, double freq, double phase, double offset) {
  ScalarSignal s;
  s.value = [=](double t) { return amp * std::sin(freq * t + phase) + offset; };
  s.derivative = [=](double t, int order) {
    return amp * std::pow(freq, order) *
           std::sin(freq * t + phase + order * kHalfPi);
  };
  return s;
}

ScalarSignal cosine(double amp, double freq, double offset) {
  return sinusoid(amp, freq, kHalfPi, offset);
}

ScalarSignal chirp_cos(double scale) {
  ScalarSignal s;
  s.value = [scale](double t) { return std::cos(t * t / scale); };
  return s;
}

ScalarSignal sawtooth(double period, double amp) {
  ScalarSignal s;
  s.value = [=](double t) {
    const double u = t / period;
    return amp * (u - std::floor(u));
  };
  return s;
}

ScalarSignal polynomial(std::vector<double> coeffs) {
  ScalarSignal s;
  s.value = [coeffs](double t) {
    double v = 0.0;
    for (std::size_t i = coeffs.size(); i-- > 0;) v = v * t + coeffs[i];
    return v;
  };
  s.derivative = [coeffs](double t, int order) {
    double v = 0.0;
    for (std::size_t i = coeffs.size(); i-- > 0;) {
      if (static_cast<int>(i) < order) break;
      double factor = 1.0;
      for (int r = 0; r < order; ++r) factor *= static_cast<double>(i - r);
      v = v * t + factor * coeffs[i];
    }
    return v;
  };
  return s;
}

ScalarSignal sum(ScalarSignal a, ScalarSignal b) {
  ScalarSignal s;
  s.value = [a, b](double t) { return a.value(t) + b.value(t); };
  if (a.derivative && b.derivative) {
    s.derivative = [a, b](double t, int order) {
      return a.derivative(t, order) + b.derivative(t, order);
    };
  }
  return s;
}

}  // namespace flowmap::signal
