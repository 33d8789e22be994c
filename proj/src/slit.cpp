#include "loewner/slit.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

namespace loewner {

namespace {

double cross(Point a, Point b) { return a.real() * b.imag() - a.imag() * b.real(); }

double point_segment_distance(Point p, Point a, Point b) {
  const Point d = b - a;
  const double len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(p - a);
  const double s = std::clamp(((p - a) * std::conj(d)).real() / len2, 0.0, 1.0);
  return std::abs(p - (a + s * d));
}

bool segments_intersect(Point a, Point b, Point c, Point d, double tol) {
  const double lo_x = std::min(a.real(), b.real()) - tol;
  const double hi_x = std::max(a.real(), b.real()) + tol;
  const double lo_y = std::min(a.imag(), b.imag()) - tol;
  const double hi_y = std::max(a.imag(), b.imag()) + tol;
  if (std::max(c.real(), d.real()) < lo_x || std::min(c.real(), d.real()) > hi_x ||
      std::max(c.imag(), d.imag()) < lo_y || std::min(c.imag(), d.imag()) > hi_y) {
    return false;
  }
  const double d1 = cross(b - a, c - a);
  const double d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c);
  const double d4 = cross(d - c, b - c);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  return point_segment_distance(c, a, b) <= tol || point_segment_distance(d, a, b) <= tol ||
         point_segment_distance(a, c, d) <= tol || point_segment_distance(b, c, d) <= tol;
}

double directed_distance(const std::vector<Point>& from, const std::vector<Point>& to) {
  auto nearest = [&](Point p) {
    double best = std::numeric_limits<double>::infinity();
    if (to.size() == 1) return std::abs(p - to.front());
    for (std::size_t i = 0; i + 1 < to.size(); ++i) {
      best = std::min(best, point_segment_distance(p, to[i], to[i + 1]));
    }
    return best;
  };
  double worst = 0.0;
  for (std::size_t i = 0; i < from.size(); ++i) {
    worst = std::max(worst, nearest(from[i]));
    if (i + 1 < from.size()) worst = std::max(worst, nearest(0.5 * (from[i] + from[i + 1])));
  }
  return worst;
}

ElementaryMap peel_map(double base, Point target, bool first, bool& degenerate) {
  try {
    return ElementaryMap::through(base, target);
  } catch (const GeometryError&) {
    if (!first || !(target.imag() > 0.0)) {
      std::ostringstream msg;
      msg << "peeled image (" << target.real() << ", " << target.imag()
          << ") is tangent to the real axis";
      throw GeometryError(msg.str());
    }
    // Tangent start: lift the segment to the flattest angle the closed form
    // resolves.
    degenerate = true;
    const double r = std::abs(target - base);
    return ElementaryMap::through(base, {target.real(), 1e-12 * r});
  }
}

}  // namespace

double SlitPolyline::diameter() const {
  double d = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    for (std::size_t j = i + 1; j < vertices.size(); ++j) {
      d = std::max(d, std::abs(vertices[i] - vertices[j]));
    }
  }
  return d;
}

double SlitPolyline::height() const {
  double h = 0.0;
  for (Point v : vertices) h = std::max(h, v.imag());
  return h;
}

double SlitPolyline::length() const {
  double l = 0.0;
  for (std::size_t i = 1; i < vertices.size(); ++i) l += std::abs(vertices[i] - vertices[i - 1]);
  return l;
}

SlitPolyline SlitPolyline::scaled(double factor) const {
  SlitPolyline out = *this;
  for (Point& v : out.vertices) v *= factor;
  return out;
}

SlitPolyline SlitPolyline::translated(double shift) const {
  SlitPolyline out = *this;
  for (Point& v : out.vertices) v += shift;
  return out;
}

SlitPolyline SlitPolyline::reflected() const {
  SlitPolyline out = *this;
  for (Point& v : out.vertices) v = -std::conj(v);
  return out;
}

SlitPolyline SlitPolyline::arc_prefix(double fraction) const {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw DomainError("arc fraction must lie in (0, 1]");
  double left = fraction * length();
  SlitPolyline out{{vertices.front()}};
  for (std::size_t i = 1; i < vertices.size() && left > 0.0; ++i) {
    const double seg = std::abs(vertices[i] - vertices[i - 1]);
    if (seg >= left) {
      out.vertices.push_back(vertices[i - 1] + (vertices[i] - vertices[i - 1]) * (left / seg));
      break;
    }
    out.vertices.push_back(vertices[i]);
    left -= seg;
  }
  return out;
}

void validate_slit(const SlitPolyline& slit) {
  const auto& v = slit.vertices;
  if (v.size() < 2) throw GeometryError("a slit needs at least two vertices");
  if (v.front().imag() != 0.0) throw GeometryError("the first slit vertex must lie on R");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i].real()) || !std::isfinite(v[i].imag())) {
      throw GeometryError("slit vertices must be finite");
    }
    if (i > 0 && !(v[i].imag() > 0.0)) {
      std::ostringstream msg;
      msg << "slit vertex " << i << " is not in the open upper half-plane";
      throw GeometryError(msg.str());
    }
    if (i > 0 && v[i] == v[i - 1]) {
      std::ostringstream msg;
      msg << "slit vertices " << i - 1 << " and " << i << " coincide";
      throw GeometryError(msg.str());
    }
  }
  constexpr double tol = 1e-12;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    for (std::size_t j = i + 2; j + 1 < v.size(); ++j) {
      if (segments_intersect(v[i], v[i + 1], v[j], v[j + 1], tol)) {
        std::ostringstream msg;
        msg << "slit segments " << i << " and " << j << " intersect";
        throw GeometryError(msg.str());
      }
    }
  }
}

double polyline_distance(const std::vector<Point>& a, const std::vector<Point>& b) {
  double best = std::numeric_limits<double>::infinity();
  auto segment_count = [](const std::vector<Point>& p) {
    return p.size() < 2 ? p.size() : p.size() - 1;
  };
  for (std::size_t i = 0; i < segment_count(a); ++i) {
    const Point a0 = a[i];
    const Point a1 = a.size() < 2 ? a[i] : a[i + 1];
    for (std::size_t j = 0; j < segment_count(b); ++j) {
      const Point b0 = b[j];
      const Point b1 = b.size() < 2 ? b[j] : b[j + 1];
      if (segments_intersect(a0, a1, b0, b1, 0.0)) return 0.0;
      best = std::min({best, point_segment_distance(a0, b0, b1), point_segment_distance(a1, b0, b1),
                       point_segment_distance(b0, a0, a1), point_segment_distance(b1, a0, a1)});
    }
  }
  return best;
}

double hausdorff(const std::vector<Point>& a, const std::vector<Point>& b) {
  if (a.empty() || b.empty()) throw DomainError("Hausdorff distance of an empty polyline");
  return std::max(directed_distance(a, b), directed_distance(b, a));
}

PeelResult drive_from_slit(const SlitPolyline& slit, double dcap) {
  validate_slit(slit);
  if (!(dcap > 0.0) || !std::isfinite(dcap)) throw DomainError("dcap must be positive");
  struct Target {
    Point original;
    Point image;
  };
  std::deque<Target> pending;
  for (std::size_t i = 1; i < slit.vertices.size(); ++i) {
    pending.push_back({slit.vertices[i], slit.vertices[i]});
  }
  PeelResult out;
  std::vector<double> times{0.0};
  std::vector<double> values{slit.base().real()};
  out.parameterized.times.push_back(0.0);
  out.parameterized.points.push_back(slit.base());
  Point previous = slit.base();
  double base = slit.base().real();
  double t = 0.0;
  const double min_split = 1e-12 * std::max(1.0, slit.diameter());
  while (!pending.empty()) {
    const Target next = pending.front();
    const bool first = out.chain.empty();
    bool degenerate = false;
    const auto m = peel_map(base, next.image, first, degenerate);
    if (m.duration() > dcap * (1.0 + 1e-9) && std::abs(next.original - previous) > min_split) {
      const Point mid = 0.5 * (previous + next.original);
      const Point image = out.chain.forward(mid);
      if (!(image.imag() > 0.0)) {
        throw GeometryError("a subdivided slit point left the upper half-plane while peeling");
      }
      pending.push_front({mid, image});
      continue;
    }
    out.degenerate_start = out.degenerate_start || degenerate;
    out.chain.push(m);
    t += m.duration();
    base = m.tip_image();
    pending.pop_front();
    for (auto& target : pending) {
      target.image = m.forward(target.image);
      if (!(target.image.imag() > 0.0)) {
        std::ostringstream msg;
        msg << "slit point (" << target.original.real() << ", " << target.original.imag()
            << ") left the upper half-plane while peeling; the slit is not simple or is tangent";
        throw GeometryError(msg.str());
      }
    }
    times.push_back(t);
    values.push_back(base);
    out.parameterized.times.push_back(t);
    out.parameterized.points.push_back(next.original);
    previous = next.original;
  }
  out.parameterized.total = t;
  if (dcap > t) {
    std::ostringstream msg;
    msg << "dcap " << dcap << " exceeds the slit's total hcap-time " << t;
    throw ResolutionError(msg.str());
  }
  out.driving = SampledDriving(std::move(times), std::move(values), Interp::PiecewiseSqrt);
  return out;
}

double hcap_of_slit(const SlitPolyline& slit, double dcap) {
  return 2.0 * drive_from_slit(slit, dcap).parameterized.total;
}

Point point_at_time(const PeelResult& peel, double t) {
  const auto& times = peel.driving.times();
  const double total = peel.parameterized.total;
  if (t <= 0.0) return peel.parameterized.points.front();
  if (t >= total) return peel.parameterized.points.back();
  const std::size_t i = peel.driving.segment(t);
  const auto& m = peel.chain.maps()[i];
  const double fraction = std::sqrt(std::clamp((t - times[i]) / m.duration(), 0.0, 1.0));
  const Point image = m.base() + (m.tip() - m.base()) * fraction;
  return peel.chain.inverse_prefix(image, i);
}

ParameterizedSlit reparameterize_by_hcap(const PeelResult& peel, int samples) {
  if (samples < 2) throw DomainError("reparameterization needs at least two samples");
  ParameterizedSlit out;
  out.total = peel.parameterized.total;
  for (int k = 0; k < samples; ++k) {
    const double t = k + 1 == samples ? out.total : out.total * k / (samples - 1);
    out.times.push_back(t);
    out.points.push_back(point_at_time(peel, t));
  }
  out.points.front() = peel.parameterized.points.front();
  out.points.back() = peel.parameterized.points.back();
  return out;
}

ParameterizedSlit reparameterize_by_hcap(const SlitPolyline& slit, int samples, double dcap) {
  return reparameterize_by_hcap(drive_from_slit(slit, dcap), samples);
}

}  // namespace loewner
