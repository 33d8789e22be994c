#pragma once

#include <vector>

#include "loewner/driving.hpp"
#include "loewner/map_chain.hpp"

namespace loewner {

/// One traced curve sampled on the macro-step grid. `own_time[i]` is the
/// hcap-time spent growing this curve up to times[i] (lambda_k t for constant
/// weights).
struct TracedCurve {
  std::vector<double> times;
  std::vector<Point> points;
  std::vector<double> own_time;
};

struct TraceResult {
  std::vector<TracedCurve> curves;
  MapChain chain;
  /// chain.size() after each macro step; step_ends[i] covers [0, times[i + 1]].
  std::vector<std::size_t> step_ends;

  /// The chain representing g_t for t = curves[0].times[i].
  MapChain chain_at(std::size_t i) const { return chain.slice(0, i == 0 ? 0 : step_ends[i - 1]); }
};

struct TraceOptions {
  /// Step endpoints 0 = s_0 < ... < s_m = T; empty selects the uniform grid of
  /// `steps` steps.
  std::vector<double> grid;
  /// Re-run at 2 * steps and fail with StepError when any common trace point
  /// moves by more than divergence_bound * 2 sqrt(T).
  bool refinement_check = false;
  double divergence_bound = 0.1;
  /// Smallest allowed gap between tip images in trace_multi.
  double collision_floor = 1e-8;
};

/// Step grid of a trace: options.grid when given, else uniform in hcap-time.
std::vector<double> step_grid(double horizon, int steps, const TraceOptions& options = {});

/// Graded grid s_i = T (1 - (1 - i/steps)^power), refined towards t = T.
std::vector<double> graded_grid(double horizon, int steps, double power);

/// Discretizes U on `steps` uniform hcap-time steps into elementary maps:
/// vertical slits for PiecewiseConstant drivings, otherwise tilted slits
/// matching U at both step ends.
MapChain discretize(const SampledDriving& u, int steps);

/// Tip trace gamma(t_i) of the one-slit equation. Tips are exact images of
/// each step's segment tip under the inverse of the preceding steps.
TraceResult trace_single(const SampledDriving& u, int steps, const TraceOptions& options = {});

/// Splitting scheme for the multiple-slit equation: each macro step of
/// length D grows every slit for lambda_k D at the current image of its tip,
/// alternating the sub-step order between macro steps.
TraceResult trace_multi(const MultiSlitSystem& system, int steps,
                        const TraceOptions& options = {});

}  // namespace loewner
