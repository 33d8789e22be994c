#pragma once

#include <vector>

#include "loewner/driving.hpp"
#include "loewner/map_chain.hpp"
#include "loewner/slit.hpp"

namespace loewner {

/// alpha(t) = 1 on the union of (k/2^level, (k + lambda)/2^level) * horizon.
struct BangBangSchedule {
  int level = 6;
  double lambda = 0.5;
  double horizon = 0.0;

  bool active(double t) const;
};

struct GrowthOptions {
  /// Own hcap-time spacing of the resampled slit points; 0 selects
  /// 1e-3 * (largest diameter)^2.
  double dcap = 0.0;
  /// Reverse the slit order in every other schedule interval.
  bool palindromic = true;
};

/// Slits resampled in their own Loewner parameterization, ready for
/// repeated alternating growth.
struct PreparedSlits {
  std::vector<SlitPolyline> slits;
  /// points[k][i] has own hcap-time own[k][i]; points[k][0] is the base.
  std::vector<std::vector<Point>> points;
  std::vector<std::vector<double>> own;
  /// hcap(Gamma_k) / 2.
  std::vector<double> own_total;
  /// hcap(union) / 2, from growing the slits one after the other.
  double horizon = 0.0;
  double dcap = 0.0;
};

/// Validates the slits (simple, ordered by base, pairwise distance above
/// 1e-6 * largest diameter) and resamples them. Throws DisjointnessError.
PreparedSlits prepare_slits(const std::vector<SlitPolyline>& slits,
                            const GrowthOptions& options = {});

struct GrowthResult {
  /// Own hcap-time consumed from each slit divided by its total.
  std::vector<double> fractions;
  /// 2 * own hcap-time consumed: x_k(T).
  std::vector<double> consumed;
  /// Schedule time at which each slit ran out; infinite if it did not.
  std::vector<double> finish_times;
  MapChain chain;
  /// Schedule interval ends k T / 2^level; drivings[k] holds the image of
  /// tip k there, progress[k] holds x_k(t).
  std::vector<double> times;
  std::vector<SampledDriving> drivings;
  std::vector<std::vector<double>> progress;
};

/// Grows slit k for lambdas[k] * T / 2^level in every schedule interval,
/// peeling from its current image (the last piece of a turn may end inside a
/// resampled segment). Exhausted slits idle. Throws ExhaustedError when every
/// slit is used up while the schedule still has time left.
GrowthResult grow_alternating(const PreparedSlits& prepared, const std::vector<double>& lambdas,
                              int level, double horizon, const GrowthOptions& options = {});

/// Two slits: slit 1 grows while schedule.active(t), slit 2 otherwise. A
/// non-positive horizon selects the union's hcap-time.
GrowthResult grow_alternating(const std::vector<SlitPolyline>& slits,
                              const BangBangSchedule& schedule, const GrowthOptions& options = {});

struct SolverOptions {
  GrowthOptions growth;
  int first_level = 6;
  int max_level = 12;
  /// Coarser levels only warm-start; the recorded drivings zigzag at the
  /// scale of one schedule interval.
  int min_level = 9;
  int max_cycles = 50;
};

struct SolverStats {
  std::vector<int> levels;
  /// lambda vector found at each level.
  std::vector<std::vector<double>> history;
  int evaluations = 0;
  int cycles = 0;
};

struct CoefficientSolution {
  std::vector<double> lambdas;
  std::vector<SampledDriving> drivings;
  double horizon = 0.0;
  /// |x_k(T) - hcap(Gamma_k)| per slit.
  std::vector<double> residuals;
  std::vector<double> hcaps;
  std::vector<double> times;
  std::vector<std::vector<double>> progress;
  /// Level at which lambda settled and the drivings were recorded.
  int level = 0;
  SolverStats stats;

  MultiSlitSystem system() const { return MultiSlitSystem(lambdas, drivings); }
};

/// Constant coefficients of n disjoint slits: at each schedule level the
/// lambdas making all slits run out together are found by a cyclic sequence
/// of one-dimensional root solves; levels increase until lambda moves by less
/// than tol. Throws ConvergenceError when max_level is reached first.
CoefficientSolution find_constant_coefficients(const std::vector<SlitPolyline>& slits,
                                               double tol = 1e-4,
                                               const SolverOptions& options = {});

struct VerificationReport {
  std::vector<double> hausdorff;
  std::vector<double> diameters;
  /// Finite-difference xdot_k on the recorded intervals, at their midpoints.
  std::vector<double> rate_times;
  std::vector<std::vector<double>> rates;
  /// xdot_k(0) estimated from the first interval.
  std::vector<double> initial_rate;
  /// 2T - sum_{m != k} hcap(Gamma_m) < 2 lambda_k T < hcap(Gamma_k).
  std::vector<bool> bounds_hold;
};

/// Traces the solution's multi-slit system and compares with the input.
VerificationReport verify_solution(const std::vector<SlitPolyline>& slits,
                                   const CoefficientSolution& solution, int steps = 4000);

}  // namespace loewner
