#pragma once

#include "loewner/driving.hpp"

namespace loewner {

/// Explicit driving whose backward flow carries z0 to z1. The trajectory
/// moves along the straight line through z0 and z1; `driving` samples the
/// closed form on [0, t_star].
struct SteerResult {
  SampledDriving driving;
  double t_star = 0.0;
  double slope = 0.0;  // c = (Re z1 - Re z0) / (Im z1 - Im z0)
  Point from;

  /// Closed-form U(t) = 2c sqrt(4t/(1+c^2) + y0^2) + x0 - c y0.
  double value(double t) const;
};

SteerResult steer_through(Point z0, Point z1, int samples = 4096);

/// Piecewise-linear driving on [0, 1] with U(r_n) = 0 at r_n = 1 - 2^-n and
/// U(w_n) = C sqrt(3 / 2^(n+2)) at w_n = 1 - 3 / 2^(n+2) for n < depth;
/// U = 0 on [r_depth, 1].
SampledDriving self_similar_zigzag(double c, int depth);

/// U(t) = c sqrt(1 - t) on [0, 1], sampled on a mesh graded towards t = 1
/// (t_i = 1 - (1 - i/n)^2) with linear interpolation.
SampledDriving hitting_driving(double c, int samples = 20000);

/// Angle at which the trace of c sqrt(1 - t), c >= 4, meets the real axis.
double hitting_angle(double c);

}  // namespace loewner
