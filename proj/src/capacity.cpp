#include "loewner/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "loewner/parallel.hpp"

namespace loewner {
namespace {

struct Disk {
  double x;
  double y;
};

std::vector<Disk> densify(const std::vector<SlitPolyline>& slits, double resolution) {
  std::vector<Disk> disks;
  for (const auto& slit : slits) {
    const auto& v = slit.vertices;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
      const Point a = v[i];
      const Point b = v[i + 1];
      // Neighbouring disks of radius y, delta apart, leave gaps of width
      // ~ delta^2 / y; keep that below the resolution.
      double s = 0.0;
      const double len = std::abs(b - a);
      while (true) {
        const Point p = len > 0.0 ? a + (b - a) * (s / len) : a;
        if (p.imag() > 0.0) disks.push_back({p.real(), p.imag()});
        if (s >= len) break;
        const double y = std::max(p.imag(), 0.0);
        s = std::min(len, s + std::max(0.5 * resolution, std::min(y, 0.5 * std::sqrt(resolution * y))));
      }
    }
  }
  return disks;
}

struct Nearest {
  double distance;
  double height;
};

Nearest nearest_on_slits(const std::vector<SlitPolyline>& slits, Point z) {
  Nearest best{std::numeric_limits<double>::infinity(), 0.0};
  for (const auto& slit : slits) {
    const auto& v = slit.vertices;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
      const Point d = v[i + 1] - v[i];
      const double l2 = std::norm(d);
      const double w = l2 > 0.0 ? std::clamp(((z - v[i]) * std::conj(d)).real() / l2, 0.0, 1.0) : 0.0;
      const Point p = v[i] + w * d;
      const double dist = std::abs(z - p);
      if (dist < best.distance) best = {dist, p.imag()};
    }
  }
  return best;
}

std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

double hsiz(const std::vector<SlitPolyline>& slits, double resolution) {
  if (!(resolution > 0.0)) throw DomainError("resolution must be positive");
  std::vector<Disk> disks = densify(slits, resolution);
  if (disks.empty()) return 0.0;
  // Disk k meets row y iff 2 y_k > y: candidates form a prefix in this order.
  std::sort(disks.begin(), disks.end(), [](const Disk& a, const Disk& b) { return a.y > b.y; });
  const double top = 2.0 * disks.front().y;
  const auto rows = static_cast<std::size_t>(std::ceil(top / resolution));
  double area = 0.0;
  std::vector<std::pair<double, double>> spans;
  for (std::size_t r = 0; r < rows; ++r) {
    const double y = (r + 0.5) * resolution;
    spans.clear();
    for (const Disk& d : disks) {
      if (2.0 * d.y <= y) break;
      const double dy = y - d.y;
      const double half = std::sqrt(std::max(0.0, d.y * d.y - dy * dy));
      if (half > 0.0) spans.emplace_back(d.x - half, d.x + half);
    }
    std::sort(spans.begin(), spans.end());
    double covered = 0.0;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = lo;
    for (const auto& [a, b] : spans) {
      if (a > hi) {
        if (hi > lo) covered += hi - lo;
        lo = a;
        hi = b;
      } else {
        hi = std::max(hi, b);
      }
    }
    if (hi > lo) covered += hi - lo;
    area += covered * resolution;
  }
  return area;
}

MonteCarloEstimate hcap_monte_carlo(const std::vector<SlitPolyline>& slits,
                                    const MonteCarloOptions& options) {
  if (options.walkers < 1) throw DomainError("at least one walker is required");
  if (!(options.shell > 0.0 && options.shell < 1.0)) throw DomainError("shell must lie in (0, 1)");
  MonteCarloEstimate out;
  out.walkers = options.walkers;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& s : slits) {
    for (const Point& p : s.vertices) {
      lo = std::min(lo, p.real());
      hi = std::max(hi, p.real());
    }
  }
  if (!std::isfinite(lo)) return out;
  const double center = 0.5 * (lo + hi);
  double reach = 0.0;
  for (const auto& s : slits) {
    for (const Point& p : s.vertices) reach = std::max(reach, std::abs(p - center));
  }
  if (reach == 0.0) return out;
  const double radius = options.start_radius > 0.0 ? options.start_radius : 2.0 * reach;
  if (radius <= reach) throw DomainError("start semicircle must enclose the hull");
  out.start_radius = radius;
  const double stop = options.shell * radius;

  const auto n = static_cast<std::size_t>(options.walkers);
  std::vector<double> heights(n);
  parallel_for(n, [&](std::size_t i) {
    std::mt19937_64 rng(mix(options.seed ^ mix(i)));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    // Start angle with density sin(theta) / 2.
    const double theta = std::acos(1.0 - 2.0 * unit(rng));
    Point z = center + std::polar(radius, theta);
    double height = 0.0;
    for (int step = 0; step < 10000000; ++step) {
      if (z.imag() <= 0.0) break;
      const Nearest hull = nearest_on_slits(slits, z);
      const double d = std::min(z.imag(), hull.distance);
      if (d < stop) {
        if (hull.distance < z.imag()) height = hull.height;
        break;
      }
      z += std::polar(d, 2.0 * kPi * unit(rng));
    }
    heights[i] = height;
  });

  const double scale = 4.0 * radius / kPi;
  double sum = 0.0;
  for (double h : heights) sum += h;
  const double mean = sum / n;
  double var = 0.0;
  for (double h : heights) var += (h - mean) * (h - mean);
  out.estimate = scale * mean;
  out.standard_error = n > 1 ? scale * std::sqrt(var / (n - 1) / n) : 0.0;
  return out;
}

}  // namespace loewner
