#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "loewner/types.hpp"

namespace loewner {

enum class Interp { PiecewiseConstant, PiecewiseSqrt, Linear };

std::string_view to_string(Interp interp);
Interp parse_interp(std::string_view name);

/// A real driving function on [0, T] given by samples and an interpolation
/// mode. PiecewiseSqrt segments are U(t) = U(t_i) + c_i sqrt(t - t_i) with
/// c_i fixed by continuity at t_{i+1}.
class SampledDriving {
 public:
  SampledDriving() = default;
  SampledDriving(std::vector<double> times, std::vector<double> values, Interp interp);

  /// U(t) = c * sqrt(t) on [0, horizon] as a single PiecewiseSqrt segment,
  /// shifted by `base`.
  static SampledDriving sqrt_driving(double c, double horizon, double base = 0.0);
  static SampledDriving constant(double value, double horizon);
  /// Samples of f on t_i = horizon * grade(i / n), Linear interpolation.
  template <class F, class G>
  static SampledDriving sample(F f, double horizon, int n, G grade, Interp interp = Interp::Linear);
  template <class F>
  static SampledDriving sample(F f, double horizon, int n, Interp interp = Interp::Linear) {
    return sample(f, horizon, n, [](double s) { return s; }, interp);
  }

  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& values() const { return values_; }
  Interp interp() const { return interp_; }
  std::size_t size() const { return times_.size(); }
  bool empty() const { return times_.empty(); }
  double horizon() const { return times_.empty() ? 0.0 : times_.back(); }

  double operator()(double t) const;
  /// Local sqrt coefficient of segment i (PiecewiseSqrt semantics).
  double coefficient(std::size_t segment) const;
  /// Index i of the segment [t_i, t_{i+1}] containing t.
  std::size_t segment(double t) const;

  double min_value() const;
  double max_value() const;

  /// d * U(t / d^2) + shift on [0, d^2 T], or its reflection -U when `reflect`.
  SampledDriving transformed(double scale, double shift, bool reflect = false) const;

 private:
  std::vector<double> times_;
  std::vector<double> values_;
  Interp interp_ = Interp::Linear;
};

template <class F, class G>
SampledDriving SampledDriving::sample(F f, double horizon, int n, G grade, Interp interp) {
  std::vector<double> t(n + 1);
  std::vector<double> u(n + 1);
  for (int i = 0; i <= n; ++i) {
    t[i] = i == n ? horizon : horizon * grade(static_cast<double>(i) / n);
    u[i] = f(t[i]);
  }
  return SampledDriving(std::move(t), std::move(u), interp);
}

/// Data of the multiple-slit equation: weights lambda_k (constant, or sampled
/// functions of t) and n ordered drivings on a common horizon.
class MultiSlitSystem {
 public:
  MultiSlitSystem() = default;
  MultiSlitSystem(std::vector<double> lambdas, std::vector<SampledDriving> drivings);
  MultiSlitSystem(std::vector<SampledDriving> lambda_functions, std::vector<SampledDriving> drivings);

  std::size_t size() const { return drivings_.size(); }
  double horizon() const { return drivings_.empty() ? 0.0 : drivings_.front().horizon(); }
  const std::vector<SampledDriving>& drivings() const { return drivings_; }
  const SampledDriving& driving(std::size_t k) const { return drivings_[k]; }
  bool constant_weights() const { return !lambda_functions_.has_value(); }
  const std::vector<double>& constant_lambdas() const { return lambdas_; }
  const std::optional<std::vector<SampledDriving>>& lambda_functions() const {
    return lambda_functions_;
  }
  double lambda(std::size_t k, double t) const;

 private:
  void validate() const;

  std::vector<double> lambdas_;
  std::optional<std::vector<SampledDriving>> lambda_functions_;
  std::vector<SampledDriving> drivings_;
};

}  // namespace loewner
