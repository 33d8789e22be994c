#include "loewner/trace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace loewner {

namespace {

ElementaryMap step_map(double base, double target, double duration, Interp interp) {
  if (interp == Interp::PiecewiseConstant) return ElementaryMap::vertical(base, duration);
  return ElementaryMap::tilted(base, (target - base) / std::sqrt(duration), duration);
}

void check_finite(Point p, double t) {
  if (!std::isfinite(p.real()) || !std::isfinite(p.imag())) {
    std::ostringstream msg;
    msg << "trace point at t=" << t << " is not finite";
    throw StepError(msg.str());
  }
}

std::vector<double> refined(const std::vector<double>& grid) {
  std::vector<double> out;
  out.reserve(2 * grid.size());
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    out.push_back(grid[i]);
    out.push_back(0.5 * (grid[i] + grid[i + 1]));
  }
  out.push_back(grid.back());
  return out;
}

void check_refinement(const TraceResult& coarse, const TraceResult& fine, double horizon,
                      double bound) {
  const double scale = 2.0 * std::sqrt(horizon);
  for (std::size_t k = 0; k < coarse.curves.size(); ++k) {
    const auto& a = coarse.curves[k].points;
    const auto& b = fine.curves[k].points;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double moved = std::abs(a[i] - b[2 * i]);
      if (moved > bound * scale) {
        std::ostringstream msg;
        msg << "trace point " << i << " of curve " << k + 1 << " moved by " << moved
            << " under step refinement (bound " << bound * scale << ")";
        throw StepError(msg.str());
      }
    }
  }
}

}  // namespace

std::vector<double> step_grid(double horizon, int steps, const TraceOptions& options) {
  if (!options.grid.empty()) {
    const auto& g = options.grid;
    if (g.size() < 2 || g.front() != 0.0 ||
        std::abs(g.back() - horizon) > 1e-12 * std::max(1.0, horizon)) {
      throw DomainError("trace grid must run from 0 to the driving horizon");
    }
    for (std::size_t i = 1; i < g.size(); ++i) {
      if (!(g[i] > g[i - 1])) throw DomainError("trace grid must be strictly increasing");
    }
    std::vector<double> out = g;
    out.back() = horizon;
    return out;
  }
  if (steps < 1) throw DomainError("trace needs at least one step");
  std::vector<double> out(steps + 1);
  for (int i = 0; i <= steps; ++i) out[i] = i == steps ? horizon : horizon * i / steps;
  return out;
}

std::vector<double> graded_grid(double horizon, int steps, double power) {
  if (steps < 1) throw DomainError("trace needs at least one step");
  std::vector<double> out(steps + 1);
  for (int i = 0; i <= steps; ++i) {
    out[i] = i == steps ? horizon
                        : horizon * (1.0 - std::pow(1.0 - static_cast<double>(i) / steps, power));
  }
  return out;
}

MapChain discretize(const SampledDriving& u, int steps) {
  const auto grid = step_grid(u.horizon(), steps);
  MapChain chain;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double t0 = grid[i];
    const double t1 = grid[i + 1];
    chain.push(step_map(u(t0), u(t1), t1 - t0, u.interp()));
  }
  return chain;
}

TraceResult trace_single(const SampledDriving& u, int steps, const TraceOptions& options) {
  const double horizon = u.horizon();
  const auto grid = step_grid(horizon, steps, options);
  const std::size_t count = grid.size() - 1;
  TraceResult result;
  TracedCurve curve;
  curve.times.reserve(count + 1);
  curve.points.reserve(count + 1);
  curve.own_time.reserve(count + 1);
  curve.times.push_back(0.0);
  curve.points.push_back({u(0.0), 0.0});
  curve.own_time.push_back(0.0);
  result.step_ends.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double t0 = grid[i];
    const double t1 = grid[i + 1];
    const auto m = step_map(u(t0), u(t1), t1 - t0, u.interp());
    const Point tip = result.chain.inverse(m.tip());
    check_finite(tip, t1);
    result.chain.push(m);
    result.step_ends.push_back(result.chain.size());
    curve.times.push_back(t1);
    curve.points.push_back(tip);
    curve.own_time.push_back(t1);
  }
  result.curves.push_back(std::move(curve));
  if (options.refinement_check) {
    TraceOptions plain = options;
    plain.refinement_check = false;
    plain.grid = refined(grid);
    check_refinement(result, trace_single(u, 2 * steps, plain), horizon,
                     options.divergence_bound);
  }
  return result;
}

TraceResult trace_multi(const MultiSlitSystem& system, int steps, const TraceOptions& options) {
  const std::size_t n = system.size();
  const double horizon = system.horizon();
  const auto grid = step_grid(horizon, steps, options);
  const std::size_t count = grid.size() - 1;
  TraceResult result;
  result.curves.resize(n);
  std::vector<double> images(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double u0 = system.driving(k)(0.0);
    images[k] = u0;
    auto& c = result.curves[k];
    c.times.assign(1, 0.0);
    c.points.assign(1, Point(u0, 0.0));
    c.own_time.assign(1, 0.0);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  result.step_ends.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double t0 = grid[i];
    const double t1 = grid[i + 1];
    const double mid = 0.5 * (t0 + t1);
    if (i > 0) std::reverse(order.begin(), order.end());
    std::vector<Point> tips(n);
    for (std::size_t k : order) {
      const double duration = system.lambda(k, mid) * (t1 - t0);
      const auto& u = system.driving(k);
      const double base = u.interp() == Interp::PiecewiseConstant ? u(t0) : images[k];
      const auto m = step_map(base, u(t1), duration, u.interp());
      tips[k] = result.chain.inverse(m.tip());
      check_finite(tips[k], t1);
      for (std::size_t j = 0; j < n; ++j) {
        if (j != k) images[j] = m.boundary_forward(images[j]);
      }
      images[k] = m.tip_image();
      result.chain.push(m);
      for (std::size_t j = 1; j < n; ++j) {
        if (images[j] - images[j - 1] < options.collision_floor) {
          std::ostringstream msg;
          msg << "tip images of slits " << j << " and " << j + 1 << " collided at t=" << t1
              << " (gap " << images[j] - images[j - 1] << ")";
          throw CollisionError(msg.str());
        }
      }
    }
    result.step_ends.push_back(result.chain.size());
    for (std::size_t k = 0; k < n; ++k) {
      auto& c = result.curves[k];
      c.times.push_back(t1);
      c.points.push_back(tips[k]);
      c.own_time.push_back(c.own_time.back() + system.lambda(k, mid) * (t1 - t0));
    }
  }
  if (options.refinement_check) {
    TraceOptions plain = options;
    plain.refinement_check = false;
    plain.grid = refined(grid);
    check_refinement(result, trace_multi(system, 2 * steps, plain), horizon,
                     options.divergence_bound);
  }
  return result;
}

}  // namespace loewner
