#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace loewner {

inline double error_norm(double e) { return std::abs(e); }
inline double error_norm(std::complex<double> e) { return std::abs(e); }

/// One Dormand-Prince 5(4) step of y' = f(t, y). Returns the fifth-order
/// solution in `next` and the embedded error estimate's norm.
template <class State, class Rhs>
double dormand_prince_step(Rhs&& f, double t, const State& y, double h, State& next) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  const State k1 = f(t, y);
  const State k2 = f(t + c2 * h, y + h * (a21 * k1));
  const State k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
  const State k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
  const State k5 = f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
  const State k6 = f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
  next = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  const State k7 = f(t + h, next);
  return error_norm(h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7));
}

}  // namespace loewner
