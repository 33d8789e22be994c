#pragma once

#include <vector>

#include "loewner/driving.hpp"

namespace loewner {

struct TrajectoryOptions {
  /// A trajectory hits U_j once |x - U_j| drops below this while closing in.
  double hit_tolerance = 1e-7;
  /// Local error bound per step: absolute + relative * (distance to the
  /// nearest driving).
  double absolute_tolerance = 1e-12;
  double relative_tolerance = 1e-8;
  /// Largest step as a fraction of the horizon.
  double max_step = 1.0 / 256.0;
};

enum class Fate { Survived, HitSingularity };

/// Solution of xdot = sum_j 2 lambda_j(t) / (x - U_j(t)) from x(start) = x0,
/// integrated towards `end` (either direction).
struct RealTrajectory {
  double start = 0.0;
  double x0 = 0.0;
  std::vector<double> times;
  std::vector<double> values;
  Fate fate = Fate::Survived;
  /// Index and time of the driving that was hit.
  std::size_t hit_index = 0;
  double hit_time = 0.0;
  /// |x(end) - U_j(end)| for every j (survivors only).
  std::vector<double> final_distances;

  double final_value() const { return values.back(); }
};

/// Forward real trajectory on [tau, T].
RealTrajectory real_trajectory(const MultiSlitSystem& system, double tau, double x0,
                               const TrajectoryOptions& options = {});

/// Backward trajectory: starts at x(T) = x0 and runs towards t = 0. A hit at
/// time t happens at backward time s = T - t.
RealTrajectory backward_trajectory(const MultiSlitSystem& system, double x0,
                                   const TrajectoryOptions& options = {});

enum class WeldVerdict { Welded, NotWelded, Indeterminate };

struct WeldingOptions {
  TrajectoryOptions trajectory;
  /// Terminal margin below which a run that never hit is indeterminate;
  /// 0 selects 1e-4 * hull diameter.
  double margin_floor = 0.0;
  /// Hull diameter used for the floor; 0 estimates it from a coarse trace.
  double diameter = 0.0;
  /// Offsets around U_j(tau) range over [min, max] * 2 sqrt(T - tau),
  /// geometrically spaced, on both sides.
  double min_offset = 1e-4;
  double max_offset = 2.0;
  /// Welding pairs sampled per component when the probe says welded.
  int pairs = 16;
  /// Evaluate the irregular-case sufficient condition at t = T.
  bool irregular_check = false;
};

/// Sufficient pattern for weldedness at t = T despite an irregular driving:
/// times s, t accumulating at T with
///   4 (T - s) + V(s)^2 - 2 V(s) max_{[s,T]} V > 0 and
///   4 (T - t) + V(t)^2 - 2 V(t) min_{[t,T]} V > 0,   V = U - U(T).
/// Checked in every dyadic band [T - 2h, T - h] for h from `window` down to
/// `smallest_scale`, at the driving's breakpoints and 16 points per band.
struct IrregularCheck {
  bool holds = false;
  /// Number of bands checked and the last band where it failed (0 if none).
  int bands = 0;
  double failed_scale = 0.0;
  double smallest_scale = 0.0;
};

IrregularCheck irregular_case_check(const SampledDriving& u, double window = 0.5,
                                    double smallest_scale = 1e-6);

/// Sampled welding homeomorphism of one component.
struct WeldingPairs {
  std::size_t component = 0;
  double center = 0.0;  // U_j(T)
  /// Cluster interval [a, b]: h(a) = b.
  double a = 0.0;
  double b = 0.0;
  /// (x, h(x)) with a <= x < center < h(x) <= b, sorted by x descending
  /// (increasing hitting time).
  std::vector<double> left;
  std::vector<double> right;
  /// Backward hitting time of each pair.
  std::vector<double> hit_times;
};

struct WeldingReport {
  WeldVerdict verdict = WeldVerdict::Indeterminate;
  bool welded = false;
  /// Smallest terminal distance over the probe grid, each rescaled by
  /// sqrt(T / (T - tau)) of its start (0 when a probe hit).
  double margin = 0.0;
  double margin_floor = 0.0;
  int probes = 0;
  int hits = 0;
  /// First probe that hit: start time, start point, hit time, driving.
  double hit_tau = 0.0;
  double hit_x0 = 0.0;
  double hit_time = 0.0;
  std::size_t hit_index = 0;
  /// Filled when welded.
  std::vector<WeldingPairs> pairs;
  std::vector<double> qs_constants;
  std::vector<IrregularCheck> irregular;
};

/// Probes forward trajectories from grid_times start times in [0, T) and
/// grid_offsets offsets on each side of every U_j(tau). Welded iff none hits
/// and the smallest terminal distance reaches the margin floor; below the
/// floor the verdict is Indeterminate.
WeldingReport is_welded(const MultiSlitSystem& system, int grid_times = 64,
                        int grid_offsets = 64, const WeldingOptions& options = {});

/// Pairs x < U_j(T) < y whose backward trajectories hit U_j at the same time.
/// Throws PairingError when the hitting time is not monotone in the start.
WeldingPairs welding_homeomorphism(const MultiSlitSystem& system, std::size_t component,
                                   int samples = 16, const TrajectoryOptions& options = {});

/// M >= 1 bounding (x - c)/(c - h(x)) and, on equally spaced triples
/// c <= x < y < z on either side, (h(x) - h(y))/(h(y) - h(z)) and its inverse.
/// Triples use h interpolated linearly between the samples.
double quasisymmetry_constant(const WeldingPairs& pairs);

}  // namespace loewner
