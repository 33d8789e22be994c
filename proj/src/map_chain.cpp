#include "loewner/map_chain.hpp"

#include <algorithm>
#include <cmath>

namespace loewner {

MapChain::MapChain(std::vector<ElementaryMap> maps) {
  maps_.reserve(maps.size());
  for (const auto& m : maps) push(m);
}

void MapChain::push(const ElementaryMap& map) {
  if (map.is_identity()) return;
  maps_.push_back(map);
  total_time_ += map.duration();
}

MapChain MapChain::slice(std::size_t first, std::size_t last) const {
  last = std::min(last, maps_.size());
  MapChain out;
  for (std::size_t i = first; i < last; ++i) out.push(maps_[i]);
  return out;
}

Point MapChain::forward(Point z, Side side) const {
  for (const auto& m : maps_) {
    z = m.forward(z, side);
  }
  return z;
}

Point MapChain::inverse(Point w) const { return inverse_prefix(w, maps_.size()); }

Point MapChain::inverse_prefix(Point w, std::size_t count) const {
  count = std::min(count, maps_.size());
  for (std::size_t i = count; i-- > 0;) {
    w = maps_[i].inverse(w);
  }
  return w;
}

double MapChain::boundary_image(double x, Side side) const {
  for (const auto& m : maps_) {
    x = m.boundary_forward(x, side);
  }
  return x;
}

Point MapChain::inverse_boundary_limit(double x) const {
  constexpr double eps = 1e-4;
  const Point coarse = inverse({x, eps});
  const Point fine = inverse({x, 0.5 * eps});
  return (4.0 * fine - coarse) / 3.0;
}

MapChain::Extent MapChain::extent() const {
  Extent e;
  if (maps_.empty()) return e;
  e.lo = e.hi = maps_.front().base();
  for (const auto& m : maps_) {
    e.lo = std::min(e.lo, std::min(m.base(), m.tip_image()));
    e.hi = std::max(e.hi, std::max(m.base(), m.tip_image()));
  }
  const double root = std::sqrt(total_time_);
  e.lo -= 4.0 * root;
  e.hi += 4.0 * root;
  e.height = 2.0 * root;
  return e;
}

Point chain_eval(const MapChain& chain, Point z, Direction direction) {
  return chain.eval(z, direction);
}

double hcap_moment(const MapChain& chain, double probe_radius) {
  if (chain.empty()) return 0.0;
  const auto e = chain.extent();
  const double centre = 0.5 * (e.lo + e.hi);
  if (!(probe_radius > 0.0)) {
    probe_radius = 100.0 * std::max(e.hi - e.lo, e.height);
  }
  // g is real on the real axis far out, so its Laurent coefficients are real
  // and g(conj z) = conj g(z): the trapezoid rule on the full circle reduces to
  // the real part of the upper-half samples.
  constexpr int samples = 32;
  double sum = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double theta = kPi * (k + 0.5) / samples;
    const Point offset = std::polar(probe_radius, theta);
    const Point z = centre + offset;
    sum += ((chain.forward(z) - z) * offset).real();
  }
  return sum / samples;
}

}  // namespace loewner
