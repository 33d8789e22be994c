#include "loewner/welding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "loewner/ode.hpp"
#include "loewner/parallel.hpp"
#include "loewner/trace.hpp"

namespace loewner {
namespace {

double velocity(const MultiSlitSystem& s, double t, double x) {
  double v = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) v += 2.0 * s.lambda(j, t) / (x - s.driving(j)(t));
  return v;
}

RealTrajectory integrate(const MultiSlitSystem& s, double start, double x0, double end,
                         const TrajectoryOptions& o) {
  const std::size_t n = s.size();
  const double horizon = s.horizon();
  const double dir = end >= start ? 1.0 : -1.0;
  RealTrajectory out;
  out.start = start;
  out.x0 = x0;
  out.times.push_back(start);
  out.values.push_back(x0);

  std::vector<double> side(n);
  std::vector<double> gap(n);
  double nearest = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    const double d = x0 - s.driving(j)(start);
    side[j] = d >= 0.0 ? 1.0 : -1.0;
    gap[j] = std::abs(d);
    nearest = std::min(nearest, gap[j]);
  }
  auto hit = [&](std::size_t j, double t) {
    out.fate = Fate::HitSingularity;
    out.hit_index = j;
    out.hit_time = t;
    return out;
  };
  for (std::size_t j = 0; j < n; ++j) {
    if (gap[j] < o.hit_tolerance) return hit(j, start);
  }

  const double h_max = o.max_step * horizon;
  const double h_min = 1e-15 * std::max(1.0, horizon);
  auto rhs = [&](double t, double x) { return velocity(s, t, x); };
  double t = start;
  double x = x0;
  double h = dir * std::min({h_max, std::abs(end - start), 0.01 * nearest * nearest + h_min});
  while (dir * (end - t) > 0.0) {
    if (dir * (t + h - end) > 0.0) h = end - t;
    double next = 0.0;
    const double err = dormand_prince_step(rhs, t, x, h, next);
    const double t_next = t + h;
    bool crossed = !std::isfinite(next) || !std::isfinite(err);
    double closest = std::numeric_limits<double>::infinity();
    if (!crossed) {
      for (std::size_t j = 0; j < n; ++j) {
        const double d = next - s.driving(j)(t_next);
        if (d * side[j] <= 0.0) crossed = true;
        closest = std::min(closest, std::abs(d));
      }
    }
    const double tol = o.absolute_tolerance + o.relative_tolerance * std::min(nearest, closest);
    if (crossed || err > tol) {
      if (std::abs(h) <= h_min) {
        // No step fits: the driving runs into the trajectory.
        std::size_t j = 0;
        for (std::size_t k = 1; k < n; ++k) {
          if (gap[k] < gap[j]) j = k;
        }
        return hit(j, t);
      }
      h *= crossed ? 0.25 : std::max(0.1, 0.9 * std::pow(tol / err, 0.2));
      if (std::abs(h) < h_min) h = dir * h_min;
      continue;
    }
    t = t_next;
    x = next;
    out.times.push_back(t);
    out.values.push_back(x);
    nearest = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      const double d = std::abs(x - s.driving(j)(t));
      if (d < o.hit_tolerance && d < gap[j]) return hit(j, t);
      gap[j] = d;
      nearest = std::min(nearest, d);
    }
    const double grow = err > 0.0 ? 0.9 * std::pow(tol / err, 0.2) : 5.0;
    h *= std::min(5.0, grow);
    if (std::abs(h) > h_max) h = dir * h_max;
  }
  out.final_distances = gap;
  return out;
}

double estimate_diameter(const MultiSlitSystem& s) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double top = 0.0;
  try {
    const auto trace = s.size() == 1 ? trace_single(s.driving(0), 512) : trace_multi(s, 512);
    for (const auto& c : trace.curves) {
      for (const Point& p : c.points) {
        lo = std::min(lo, p.real());
        hi = std::max(hi, p.real());
        top = std::max(top, p.imag());
      }
    }
    return std::hypot(hi - lo, top);
  } catch (const Error&) {
    // Bounding box of the hull: drivings' range widened by 2 sqrt(T).
    for (const auto& u : s.drivings()) {
      lo = std::min(lo, u.min_value());
      hi = std::max(hi, u.max_value());
    }
    const double r = 2.0 * std::sqrt(s.horizon());
    return std::hypot(hi - lo + 2.0 * r, r);
  }
}

// Backward hitting time of component j from x(T) = x0; infinity when the
// trajectory survives or hits another driving.
double hitting_time(const MultiSlitSystem& s, std::size_t j, double x0,
                    const TrajectoryOptions& o) {
  const auto tr = integrate(s, s.horizon(), x0, 0.0, o);
  if (tr.fate == Fate::HitSingularity && tr.hit_index == j) return s.horizon() - tr.hit_time;
  return std::numeric_limits<double>::infinity();
}

// Boundary of the set {x : hitting_time(x) finite} between `inside` (hits)
// and `outside` (does not).
double cluster_end(const MultiSlitSystem& s, std::size_t j, double inside, double outside,
                   const TrajectoryOptions& o) {
  for (int i = 0; i < 200 && std::abs(outside - inside) > 1e-13 * (1.0 + std::abs(inside)); ++i) {
    const double mid = 0.5 * (inside + outside);
    (std::isfinite(hitting_time(s, j, mid, o)) ? inside : outside) = mid;
  }
  return inside;
}

// Start between `near` (hitting time below target) and `far` with the given
// hitting time.
double match_time(const MultiSlitSystem& s, std::size_t j, double target, double near, double far,
                  const TrajectoryOptions& o) {
  for (int i = 0; i < 200 && std::abs(far - near) > 1e-13 * (1.0 + std::abs(near)); ++i) {
    const double mid = 0.5 * (near + far);
    (hitting_time(s, j, mid, o) < target ? near : far) = mid;
  }
  return 0.5 * (near + far);
}

double suffix_extreme(const SampledDriving& u, double from, bool maximum) {
  const double sign = maximum ? 1.0 : -1.0;
  double best = sign * u(from);
  const auto& t = u.times();
  const auto& v = u.values();
  for (std::size_t i = std::upper_bound(t.begin(), t.end(), from) - t.begin(); i < t.size(); ++i) {
    best = std::max(best, sign * v[i]);
  }
  return sign * best;
}

}  // namespace

RealTrajectory real_trajectory(const MultiSlitSystem& system, double tau, double x0,
                               const TrajectoryOptions& options) {
  if (!(tau >= 0.0 && tau < system.horizon())) throw DomainError("start time must lie in [0, T)");
  return integrate(system, tau, x0, system.horizon(), options);
}

RealTrajectory backward_trajectory(const MultiSlitSystem& system, double x0,
                                   const TrajectoryOptions& options) {
  return integrate(system, system.horizon(), x0, 0.0, options);
}

IrregularCheck irregular_case_check(const SampledDriving& u, double window,
                                    double smallest_scale) {
  if (!(window > 0.0 && smallest_scale > 0.0)) throw DomainError("scales must be positive");
  const double end = u.horizon();
  const double at_end = u(end);
  IrregularCheck out;
  out.holds = true;
  const auto& times = u.times();
  for (double h = std::min(window, 0.5 * end); h >= smallest_scale; h *= 0.5) {
    ++out.bands;
    out.smallest_scale = h;
    std::vector<double> candidates;
    for (int i = 0; i <= 16; ++i) candidates.push_back(end - 2.0 * h + h * i / 16.0);
    const auto first = std::lower_bound(times.begin(), times.end(), end - 2.0 * h);
    const auto last = std::upper_bound(times.begin(), times.end(), end - h);
    candidates.insert(candidates.end(), first, last);
    bool above = false;
    bool below = false;
    for (double s : candidates) {
      const double v = u(s) - at_end;
      const double gap = 4.0 * (end - s) + v * v;
      above = above || gap - 2.0 * v * (suffix_extreme(u, s, true) - at_end) > 0.0;
      below = below || gap - 2.0 * v * (suffix_extreme(u, s, false) - at_end) > 0.0;
    }
    if (!(above && below)) {
      out.holds = false;
      out.failed_scale = h;
    }
  }
  return out;
}

WeldingReport is_welded(const MultiSlitSystem& system, int grid_times, int grid_offsets,
                        const WeldingOptions& options) {
  if (grid_times < 1 || grid_offsets < 1) throw DomainError("probe grids need at least one point");
  if (!(options.min_offset > 0.0 && options.max_offset >= options.min_offset)) {
    throw DomainError("offsets must satisfy 0 < min_offset <= max_offset");
  }
  const double horizon = system.horizon();
  const std::size_t n = system.size();
  WeldingReport report;
  const double diameter = options.diameter > 0.0 ? options.diameter : estimate_diameter(system);
  report.margin_floor = options.margin_floor > 0.0 ? options.margin_floor : 1e-4 * diameter;

  struct Probe {
    double tau;
    double x0;
  };
  std::vector<Probe> probes;
  for (int i = 0; i < grid_times; ++i) {
    const double tau = horizon * i / grid_times;
    const double scale = 2.0 * std::sqrt(horizon - tau);
    for (std::size_t j = 0; j < n; ++j) {
      const double center = system.driving(j)(tau);
      for (int m = 0; m < grid_offsets; ++m) {
        const double f = grid_offsets == 1 ? 0.0 : static_cast<double>(m) / (grid_offsets - 1);
        const double offset =
            scale * options.min_offset * std::pow(options.max_offset / options.min_offset, f);
        for (double sign : {-1.0, 1.0}) probes.push_back({tau, center + sign * offset});
      }
    }
  }
  std::vector<RealTrajectory> runs(probes.size());
  parallel_for(probes.size(), [&](std::size_t i) {
    runs[i] = real_trajectory(system, probes[i].tau, probes[i].x0, options.trajectory);
  });

  report.probes = static_cast<int>(probes.size());
  report.margin = std::numeric_limits<double>::infinity();
  for (const auto& r : runs) {
    if (r.fate == Fate::HitSingularity) {
      if (report.hits++ == 0) {
        report.hit_tau = r.start;
        report.hit_x0 = r.x0;
        report.hit_time = r.hit_time;
        report.hit_index = r.hit_index;
      }
      report.margin = 0.0;
      continue;
    }
    // Starts at tau only get 2 sqrt(T - tau) of room; compare on the tau = 0 scale.
    const double scale = std::sqrt(horizon / (horizon - r.start));
    for (double d : r.final_distances) report.margin = std::min(report.margin, d * scale);
  }
  if (report.hits > 0) {
    report.verdict = WeldVerdict::NotWelded;
  } else if (report.margin >= report.margin_floor) {
    report.verdict = WeldVerdict::Welded;
  } else {
    report.verdict = WeldVerdict::Indeterminate;
  }
  report.welded = report.verdict == WeldVerdict::Welded;

  if (report.welded && options.pairs >= 3) {
    for (std::size_t j = 0; j < n; ++j) {
      report.pairs.push_back(welding_homeomorphism(system, j, options.pairs, options.trajectory));
      report.qs_constants.push_back(quasisymmetry_constant(report.pairs.back()));
    }
  }
  if (options.irregular_check) {
    for (const auto& u : system.drivings()) report.irregular.push_back(irregular_case_check(u));
  }
  return report;
}

WeldingPairs welding_homeomorphism(const MultiSlitSystem& system, std::size_t component,
                                   int samples, const TrajectoryOptions& options) {
  const std::size_t n = system.size();
  if (component >= n) throw DomainError("no such component");
  if (samples < 1) throw DomainError("at least one welding pair is required");
  const double horizon = system.horizon();
  WeldingPairs out;
  out.component = component;
  out.center = system.driving(component)(horizon);
  const double c = out.center;

  // Starts that never reach U_j: the neighbouring drivings' end points, or
  // far enough out on the outer sides.
  double reach = 4.0 * std::sqrt(horizon);
  for (const auto& u : system.drivings()) reach += u.max_value() - u.min_value();
  auto outside = [&](double sign) {
    const std::size_t k = component;
    if (sign < 0.0 && k > 0) return system.driving(k - 1)(horizon);
    if (sign > 0.0 && k + 1 < n) return system.driving(k + 1)(horizon);
    double r = reach;
    for (int i = 0; i < 20 && std::isfinite(hitting_time(system, k, c + sign * r, options)); ++i) {
      r *= 2.0;
    }
    return c + sign * r;
  };
  const double nudge = 4.0 * options.hit_tolerance;
  out.a = cluster_end(system, component, c - nudge, outside(-1.0), options);
  out.b = cluster_end(system, component, c + nudge, outside(1.0), options);

  std::vector<double> lefts(samples);
  std::vector<double> times(samples);
  std::vector<double> rights(samples);
  parallel_for(static_cast<std::size_t>(samples), [&](std::size_t i) {
    if (static_cast<int>(i) + 1 == samples) {
      lefts[i] = out.a;
      rights[i] = out.b;
      times[i] = hitting_time(system, component, out.a, options);
      return;
    }
    lefts[i] = c + (out.a - c) * static_cast<double>(i + 1) / samples;
    times[i] = hitting_time(system, component, lefts[i], options);
    if (std::isfinite(times[i])) {
      rights[i] = match_time(system, component, times[i], c + nudge, out.b, options);
    }
  });
  for (int i = 0; i < samples; ++i) {
    const bool inside = std::isfinite(times[i]);
    const bool ordered = i == 0 || times[i] >= times[i - 1];
    if (!inside || !ordered) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "hitting time of component " << component << " is not monotone: start "
          << lefts[i] << " hits at " << times[i];
      if (i > 0) msg << " after start " << lefts[i - 1] << " hitting at " << times[i - 1];
      throw PairingError(msg.str());
    }
  }
  out.left = std::move(lefts);
  out.right = std::move(rights);
  out.hit_times = std::move(times);
  return out;
}

double quasisymmetry_constant(const WeldingPairs& p) {
  const std::size_t m = p.left.size();
  if (m < 3 || p.right.size() != m) throw DomainError("at least three welding pairs are required");
  const double c = p.center;
  double worst = 1.0;
  auto widen = [&](double r) {
    if (r > 0.0 && std::isfinite(r)) worst = std::max({worst, r, 1.0 / r});
  };
  for (std::size_t i = 0; i < m; ++i) widen((p.right[i] - c) / (c - p.left[i]));

  // h on each side, as increasing distance from c.
  std::vector<double> dl{0.0}, dr{0.0};
  for (std::size_t i = 0; i < m; ++i) {
    dl.push_back(c - p.left[i]);
    dr.push_back(p.right[i] - c);
  }
  auto interp = [](const std::vector<double>& from, const std::vector<double>& to, double x) {
    const auto it = std::lower_bound(from.begin(), from.end(), x);
    if (it == from.begin()) return to.front();
    if (it == from.end()) return to.back();
    const std::size_t i = it - from.begin();
    const double w = (x - from[i - 1]) / (from[i] - from[i - 1]);
    return to[i - 1] + w * (to[i] - to[i - 1]);
  };
  for (const auto* side : {&dl, &dr}) {
    const auto& from = *side;
    const auto& to = side == &dl ? dr : dl;
    if (!std::is_sorted(from.begin(), from.end())) continue;
    const double span = from.back();
    const int grid = 32;
    for (int a = 0; a < grid; ++a) {
      for (int d = 1; a + 2 * d <= grid; ++d) {
        const double x = span * a / grid;
        const double step = span * d / grid;
        const double hx = interp(from, to, x);
        const double hy = interp(from, to, x + step);
        const double hz = interp(from, to, x + 2.0 * step);
        widen((hy - hx) / (hz - hy));
      }
    }
  }
  return worst;
}

}  // namespace loewner
