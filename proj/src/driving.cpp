#include "loewner/driving.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace loewner {

std::string_view to_string(Interp interp) {
  switch (interp) {
    case Interp::PiecewiseConstant:
      return "PiecewiseConstant";
    case Interp::PiecewiseSqrt:
      return "PiecewiseSqrt";
    case Interp::Linear:
      return "Linear";
  }
  return "Linear";
}

Interp parse_interp(std::string_view name) {
  if (name == "PiecewiseConstant" || name == "constant") return Interp::PiecewiseConstant;
  if (name == "PiecewiseSqrt" || name == "sqrt") return Interp::PiecewiseSqrt;
  if (name == "Linear" || name == "linear") return Interp::Linear;
  throw DomainError("unknown interpolation mode '" + std::string(name) + "'");
}

SampledDriving::SampledDriving(std::vector<double> times, std::vector<double> values,
                               Interp interp)
    : times_(std::move(times)), values_(std::move(values)), interp_(interp) {
  if (times_.size() != values_.size()) {
    throw DomainError("driving has different numbers of times and values");
  }
  if (times_.empty()) throw DomainError("driving needs at least one sample");
  if (times_.front() != 0.0) throw DomainError("driving times must start at 0");
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!std::isfinite(times_[i]) || !std::isfinite(values_[i])) {
      throw DomainError("driving samples must be finite");
    }
    if (i > 0 && !(times_[i] > times_[i - 1])) {
      std::ostringstream msg;
      msg << "driving times must be strictly increasing (sample " << i << ")";
      throw DomainError(msg.str());
    }
  }
}

SampledDriving SampledDriving::sqrt_driving(double c, double horizon, double base) {
  return SampledDriving({0.0, horizon}, {base, base + c * std::sqrt(horizon)},
                        Interp::PiecewiseSqrt);
}

SampledDriving SampledDriving::constant(double value, double horizon) {
  return SampledDriving({0.0, horizon}, {value, value}, Interp::Linear);
}

std::size_t SampledDriving::segment(double t) const {
  if (times_.size() < 2) return 0;
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const auto i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - times_.begin() - 1));
  return std::min(i, times_.size() - 2);
}

double SampledDriving::coefficient(std::size_t i) const {
  return (values_[i + 1] - values_[i]) / std::sqrt(times_[i + 1] - times_[i]);
}

double SampledDriving::operator()(double t) const {
  if (times_.empty()) throw DomainError("evaluating an empty driving");
  const double horizon = times_.back();
  if (t < 0.0 || t > horizon * (1.0 + 1e-12) + 1e-300) {
    std::ostringstream msg;
    msg << "driving evaluated at t=" << t << " outside [0, " << horizon << "]";
    throw DomainError(msg.str());
  }
  if (times_.size() == 1) return values_.front();
  t = std::min(t, horizon);
  if (t == horizon) return values_.back();
  const std::size_t i = segment(t);
  const double dt = t - times_[i];
  switch (interp_) {
    case Interp::PiecewiseConstant:
      return values_[i];
    case Interp::PiecewiseSqrt:
      return values_[i] + coefficient(i) * std::sqrt(dt);
    case Interp::Linear:
      return values_[i] + (values_[i + 1] - values_[i]) * dt / (times_[i + 1] - times_[i]);
  }
  return values_[i];
}

double SampledDriving::min_value() const {
  return *std::min_element(values_.begin(), values_.end());
}

double SampledDriving::max_value() const {
  return *std::max_element(values_.begin(), values_.end());
}

SampledDriving SampledDriving::transformed(double scale, double shift, bool reflect) const {
  std::vector<double> t(times_.size());
  std::vector<double> u(values_.size());
  const double sign = reflect ? -1.0 : 1.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i] = scale * scale * times_[i];
    u[i] = sign * scale * values_[i] + shift;
  }
  return SampledDriving(std::move(t), std::move(u), interp_);
}

MultiSlitSystem::MultiSlitSystem(std::vector<double> lambdas, std::vector<SampledDriving> drivings)
    : lambdas_(std::move(lambdas)), drivings_(std::move(drivings)) {
  validate();
}

MultiSlitSystem::MultiSlitSystem(std::vector<SampledDriving> lambda_functions,
                                 std::vector<SampledDriving> drivings)
    : lambda_functions_(std::move(lambda_functions)), drivings_(std::move(drivings)) {
  validate();
}

double MultiSlitSystem::lambda(std::size_t k, double t) const {
  if (!lambda_functions_) return lambdas_[k];
  return (*lambda_functions_)[k](std::min(t, (*lambda_functions_)[k].horizon()));
}

void MultiSlitSystem::validate() const {
  const std::size_t n = drivings_.size();
  if (n == 0) throw DomainError("system needs at least one driving");
  const std::size_t weights = lambda_functions_ ? lambda_functions_->size() : lambdas_.size();
  if (weights != n) throw DomainError("system needs one weight per driving");
  const double horizon = drivings_.front().horizon();
  for (const auto& u : drivings_) {
    if (std::abs(u.horizon() - horizon) > 1e-12 * std::max(1.0, horizon)) {
      throw DomainError("system drivings must share a common horizon");
    }
  }
  std::set<double> grid;
  for (const auto& u : drivings_) grid.insert(u.times().begin(), u.times().end());
  if (lambda_functions_) {
    for (const auto& l : *lambda_functions_) {
      if (l.horizon() < horizon * (1.0 - 1e-12)) {
        throw DomainError("weight functions must cover the driving horizon");
      }
      for (double t : l.times()) {
        if (t <= horizon) grid.insert(t);
      }
    }
  }
  for (double t : grid) {
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double l = lambda(k, t);
      if (!(l > 0.0 && l < 1.0) && n > 1) {
        std::ostringstream msg;
        msg << "weight lambda_" << k + 1 << "(" << t << ") = " << l << " is not in (0, 1)";
        throw DomainError(msg.str());
      }
      sum += l;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      std::ostringstream msg;
      msg << "weights sum to " << sum << " at t=" << t << ", not 1";
      throw DomainError(msg.str());
    }
    for (std::size_t k = 1; k < n; ++k) {
      if (!(drivings_[k - 1](t) < drivings_[k](t))) {
        std::ostringstream msg;
        msg << "drivings are not strictly ordered at t=" << t << " (U_" << k << " >= U_" << k + 1
            << ")";
        throw DomainError(msg.str());
      }
    }
  }
}

}  // namespace loewner
