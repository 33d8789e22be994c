#include "loewner/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "loewner/elementary_map.hpp"

namespace loewner {
namespace {

struct Range {
  double low = std::numeric_limits<double>::infinity();
  double high = 0.0;
  void add(double q) {
    low = std::min(low, q);
    high = std::max(high, q);
  }
};

// Range of |U(p) - U(t)| / |p - t| ^ 1/2 over p in [lo, hi], t outside (lo, hi).
Range quotient_range(const SampledDriving& u, double t, double lo, double hi) {
  Range out;
  if (!(hi > lo)) return out;
  const auto& times = u.times();
  const auto& values = u.values();
  const double ut = u(t);
  const double sigma = lo >= t ? 1.0 : -1.0;
  auto add_point = [&](double p) {
    const double d = std::abs(p - t);
    if (d > 0.0) out.add(std::abs(u(p) - ut) / std::sqrt(d));
  };
  for (std::size_t i = u.segment(lo); i + 1 < times.size() && times[i] < hi; ++i) {
    const double a = std::max(lo, times[i]);
    const double b = std::min(hi, times[i + 1]);
    if (b < a) continue;
    if (u.interp() != Interp::Linear) {
      for (int k = 0; k <= 32; ++k) add_point(a + (b - a) * k / 32.0);
      continue;
    }
    // U(p) - U(t) = alpha + beta D with D = |p - t| on this segment.
    const double k = (values[i + 1] - values[i]) / (times[i + 1] - times[i]);
    const double alpha = values[i] - ut + k * (t - times[i]);
    const double beta = k * sigma;
    const double d0 = std::abs(a - t);
    const double d1 = std::abs(b - t);
    auto add = [&](double d) {
      if (d > 0.0) out.add(std::abs(alpha + beta * d) / std::sqrt(d));
    };
    add(d0);
    add(d1);
    if (beta != 0.0) {
      const double dmin = std::min(d0, d1);
      const double dmax = std::max(d0, d1);
      for (double d : {alpha / beta, -alpha / beta}) {
        if (d > dmin && d < dmax) add(d);
      }
    }
  }
  return out;
}

HolderReport holder(const SampledDriving& u, double window, const HolderOptions& options,
                    const std::function<double(double)>& threshold) {
  if (!(window > 0.0)) throw DomainError("window must be positive");
  if (!(options.smallest_scale > 0.0)) throw DomainError("smallest scale must be positive");
  if (u.size() < 2) throw DomainError("driving needs at least two samples");
  const double horizon = u.horizon();
  const double start = u.times().front();
  HolderReport r;
  r.times = options.times.empty() ? u.times() : options.times;
  const std::size_t m = r.times.size();
  r.left.assign(m, 0.0);
  r.right.assign(m, 0.0);
  r.two_sided.assign(m, 0.0);
  r.liminf.assign(m, 0.0);
  r.limsup.assign(m, 0.0);
  r.thresholds.assign(m, 0.0);
  r.verdicts.assign(m, HolderVerdict::Regular);
  r.smallest_scale = window;
  for (std::size_t i = 0; i < m; ++i) {
    const double t = r.times[i];
    if (t < start || t > horizon) throw DomainError("evaluation time outside the driving's range");
    r.left[i] = quotient_range(u, t, std::max(start, t - window), t).high;
    r.right[i] = quotient_range(u, t, t, std::min(horizon, t + window)).high;
    r.thresholds[i] = threshold(t);
    double low = std::numeric_limits<double>::infinity();
    double high = 0.0;
    for (double h = window; 0.5 * h >= options.smallest_scale * (1.0 - 1e-12); h *= 0.5) {
      if (t - 0.5 * h <= start) continue;
      const Range band = quotient_range(u, t, std::max(start, t - h), t - 0.5 * h);
      low = std::min(low, band.low);
      high = std::max(high, band.high);
      r.smallest_scale = std::min(r.smallest_scale, 0.5 * h);
    }
    if (!std::isfinite(low)) low = 0.0;
    r.liminf[i] = low;
    r.limsup[i] = high;
    if (high <= r.thresholds[i]) {
      r.verdicts[i] = HolderVerdict::Regular;
    } else if (low > r.thresholds[i]) {
      r.verdicts[i] = HolderVerdict::Violating;
    } else {
      r.verdicts[i] = HolderVerdict::Irregular;
    }
  }
  // Sliding maximum of the one-sided norms over [t - window, t + window].
  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return r.times[a] < r.times[b]; });
  std::size_t first = 0;
  for (std::size_t oi = 0; oi < m; ++oi) {
    const double t = r.times[order[oi]];
    while (r.times[order[first]] < t - window) ++first;
    double best = 0.0;
    for (std::size_t oj = first; oj < m && r.times[order[oj]] <= t + window; ++oj) {
      best = std::max({best, r.left[order[oj]], r.right[order[oj]]});
    }
    r.two_sided[order[oi]] = best;
  }
  return r;
}

}  // namespace

std::string_view to_string(HolderVerdict verdict) {
  switch (verdict) {
    case HolderVerdict::Regular:
      return "regular";
    case HolderVerdict::Irregular:
      return "irregular";
    case HolderVerdict::Violating:
      return "violating";
  }
  return "unknown";
}

double left_quotient_sup(const SampledDriving& u, double t, double from, double to) {
  if (!(to < t)) throw DomainError("the range must lie left of t");
  return quotient_range(u, t, from, to).high;
}

HolderReport local_holder_norms(const SampledDriving& u, double window,
                                const HolderOptions& options) {
  return holder(u, window, options, [](double) { return 4.0; });
}

HolderReport local_holder_norms(const MultiSlitSystem& system, std::size_t j, double window,
                                const HolderOptions& options) {
  if (j >= system.size()) throw DomainError("no such driving");
  return holder(system.driving(j), window, options,
                [&](double t) { return 4.0 * std::sqrt(system.lambda(j, t)); });
}

double approach_angle_from_coefficient(double c, double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw DomainError("lambda must lie in (0, 1]");
  return slit_angle(c / std::sqrt(lambda));
}

AngleEstimate approach_angle(const std::vector<Point>& curve, double base,
                             const AngleOptions& options) {
  if (!(options.arc_fraction > 0.0 && options.arc_fraction <= 1.0)) {
    throw DomainError("arc fraction must lie in (0, 1]");
  }
  std::vector<double> arc{0.0};
  for (std::size_t i = 1; i < curve.size(); ++i) arc.push_back(arc.back() + std::abs(curve[i] - curve[i - 1]));
  const double reach = options.arc_fraction * arc.back();
  const int inside =
      static_cast<int>(std::upper_bound(arc.begin(), arc.end(), reach) - arc.begin()) - 1;
  if (curve.size() < 2 || inside < std::max(options.min_points, 2)) {
    throw InsufficientData("only " + std::to_string(std::max(inside, 0)) +
                           " curve points lie within the fitted arc");
  }
  const Point anchor(base, 0.0);
  std::vector<Point> q;
  std::size_t seg = 0;
  for (int k = 1; k <= inside; ++k) {
    const double s = reach * k / inside;
    while (seg + 2 < arc.size() && arc[seg + 1] < s) ++seg;
    const double len = arc[seg + 1] - arc[seg];
    const double w = len > 0.0 ? (s - arc[seg]) / len : 0.0;
    q.push_back(curve[seg] + w * (curve[seg + 1] - curve[seg]) - anchor);
  }
  double sxy = 0.0, diff = 0.0;
  for (const Point& p : q) {
    sxy += p.real() * p.imag();
    diff += p.real() * p.real() - p.imag() * p.imag();
  }
  double angle = 0.5 * std::atan2(2.0 * sxy, diff);
  if (angle < 0.0) angle += kPi;
  const double c = std::cos(angle), s = std::sin(angle);
  double residual = 0.0, along = 0.0, radius = 0.0;
  for (const Point& p : q) {
    const double e = -p.real() * s + p.imag() * c;
    const double l = p.real() * c + p.imag() * s;
    residual += e * e;
    along += l * l;
    radius = std::max(radius, std::abs(p));
  }
  AngleEstimate out;
  out.angle = angle;
  out.standard_error = along > 0.0 ? std::sqrt(residual / (q.size() - 1) / along) : 0.0;
  out.low = angle - options.z * out.standard_error;
  out.high = angle + options.z * out.standard_error;
  out.points = inside;
  out.radius = radius;
  return out;
}

AngleEstimate approach_angle(const SlitPolyline& slit, const AngleOptions& options) {
  if (slit.vertices.empty()) throw InsufficientData("empty slit");
  return approach_angle(slit.vertices, slit.base().real(), options);
}

AngleEstimate terminal_angle(const std::vector<Point>& curve, double landing,
                             const AngleOptions& options) {
  if (curve.empty()) throw InsufficientData("empty curve");
  const std::vector<Point> reversed(curve.rbegin(), curve.rend());
  return approach_angle(reversed, std::isnan(landing) ? curve.back().real() : landing, options);
}

}  // namespace loewner
