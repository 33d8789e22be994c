#pragma once

#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "loewner/driving.hpp"
#include "loewner/slit.hpp"

namespace loewner {

enum class HolderVerdict { Regular, Irregular, Violating };

std::string_view to_string(HolderVerdict verdict);

struct HolderOptions {
  /// Dyadic scales h run from the window down to this.
  double smallest_scale = 1e-6;
  /// Evaluation times; empty selects the driving's sample times.
  std::vector<double> times;
};

/// Local 1/2-Hoelder quotients q(r, s) = |U(r) - U(s)| / sqrt|r - s| of a
/// driving around each evaluation time t.
struct HolderReport {
  std::vector<double> times;
  /// sup q(t, s) over s in [t - window, t), and over s in (t, t + window].
  std::vector<double> left;
  std::vector<double> right;
  /// Largest left or right norm among the evaluation times in
  /// [t - window, t + window]: pairs reaching up to 2 window with one end at an
  /// evaluation time.
  std::vector<double> two_sided;
  /// Proxies of liminf / limsup as h -> 0 of q(t, t - h): the smallest and
  /// largest of q over the dyadic bands h in [2^-(k+1) w, 2^-k w] down to the
  /// smallest scale.
  std::vector<double> liminf;
  std::vector<double> limsup;
  /// 4 sqrt(lambda(t)).
  std::vector<double> thresholds;
  /// Regular when limsup <= threshold, Violating when liminf > threshold,
  /// otherwise Irregular.
  std::vector<HolderVerdict> verdicts;
  /// Smallest h actually examined.
  double smallest_scale = 0.0;
};

/// Norms against the one-slit threshold 4.
HolderReport local_holder_norms(const SampledDriving& u, double window,
                                const HolderOptions& options = {});

/// Norms of driving j against 4 sqrt(lambda_j(t)).
HolderReport local_holder_norms(const MultiSlitSystem& system, std::size_t j, double window,
                                const HolderOptions& options = {});

/// sup over s in [from, to] (to < t) of |U(t) - U(s)| / sqrt(t - s); exact
/// for Linear interpolation, sampled at 32 points per segment otherwise.
double left_quotient_sup(const SampledDriving& u, double t, double from, double to);

/// Line approach angle phi in (0, pi) for the local sqrt coefficient c of
/// U_j(t) - U_j(0) at t = 0: inverts c = 2 sqrt(lambda) (pi - 2 phi) / sqrt(phi (pi - phi)).
double approach_angle_from_coefficient(double c, double lambda = 1.0);

struct AngleOptions {
  /// Fraction of the arc length, measured from the anchor end, that is fitted.
  double arc_fraction = 0.05;
  int min_points = 10;
  /// Two-sided normal quantile of the confidence interval.
  double z = 1.96;
};

struct AngleEstimate {
  /// arg(gamma - anchor) of the fitted line through the anchor, in (0, pi).
  double angle = 0.0;
  double standard_error = 0.0;
  double low = 0.0;
  double high = 0.0;
  /// Curve points inside the fitted arc and its largest distance to the anchor.
  int points = 0;
  double radius = 0.0;
};

/// Angle in which a curve leaves its first point `base` (real). The innermost
/// arc is resampled uniformly in arc length and fitted by a line through the
/// base (total least squares). Throws InsufficientData when that arc holds
/// fewer than min_points curve points.
AngleEstimate approach_angle(const std::vector<Point>& curve, double base,
                             const AngleOptions& options = {});
AngleEstimate approach_angle(const SlitPolyline& slit, const AngleOptions& options = {});

/// Angle at which a curve ends on the real axis at `landing`; NaN selects the
/// real part of the last point.
AngleEstimate terminal_angle(const std::vector<Point>& curve,
                             double landing = std::numeric_limits<double>::quiet_NaN(),
                             const AngleOptions& options = {});

}  // namespace loewner
