#include "loewner/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace loewner {

double SteerResult::value(double t) const {
  const double c = slope;
  const double y0 = from.imag();
  return 2.0 * c * std::sqrt(4.0 * t / (1.0 + c * c) + y0 * y0) + from.real() - c * y0;
}

SteerResult steer_through(Point z0, Point z1, int samples) {
  if (!(z0.imag() > 0.0)) throw DomainError("steer_through needs a start point in H");
  SteerResult r;
  r.from = z0;
  if (z1 == z0) {
    r.driving = SampledDriving({0.0}, {z0.real()}, Interp::Linear);
    return r;
  }
  if (!(z1.imag() > z0.imag())) {
    std::ostringstream msg;
    msg << "target height " << z1.imag() << " is not above the start height " << z0.imag()
        << "; backward flows only increase the imaginary part";
    throw DomainError(msg.str());
  }
  r.slope = (z1.real() - z0.real()) / (z1.imag() - z0.imag());
  r.t_star = (1.0 + r.slope * r.slope) * (z1.imag() * z1.imag() - z0.imag() * z0.imag()) / 4.0;
  // U is smooth in t; finer samples near t = 0 where the curvature is largest.
  r.driving = SampledDriving::sample([&](double t) { return r.value(t); }, r.t_star,
                                     std::max(samples, 1), [](double s) { return s * s; });
  return r;
}

SampledDriving self_similar_zigzag(double c, int depth) {
  if (!(c > 0.0)) throw DomainError("zigzag amplitude must be positive");
  if (depth < 1) throw DomainError("zigzag depth must be at least 1");
  std::vector<double> t;
  std::vector<double> u;
  for (int n = 0; n < depth; ++n) {
    const double scale = std::ldexp(1.0, -(n + 2));
    t.push_back(1.0 - std::ldexp(1.0, -n));
    u.push_back(0.0);
    t.push_back(1.0 - 3.0 * scale);
    u.push_back(c * std::sqrt(3.0 * scale));
  }
  t.push_back(1.0 - std::ldexp(1.0, -depth));
  u.push_back(0.0);
  t.push_back(1.0);
  u.push_back(0.0);
  return SampledDriving(std::move(t), std::move(u), Interp::Linear);
}

SampledDriving hitting_driving(double c, int samples) {
  return SampledDriving::sample([c](double t) { return c * std::sqrt(std::max(0.0, 1.0 - t)); },
                                1.0, samples, [](double s) { return 1.0 - (1.0 - s) * (1.0 - s); });
}

double hitting_angle(double c) {
  if (!(c >= 4.0)) throw DomainError("the trace of c sqrt(1 - t) hits the real axis only for c >= 4");
  const double root = std::sqrt(c * c - 16.0);
  return kPi - 2.0 * kPi * root / (root + c);
}

}  // namespace loewner
