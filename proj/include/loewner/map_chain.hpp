#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "loewner/elementary_map.hpp"

namespace loewner {

/// A composition g = m_n o ... o m_1 of elementary slit maps. `forward`
/// applies the members in push order (g_T), `inverse` applies their inverses in
/// reverse order (f_T = g_T^{-1}). Total hcap-time is tracked exactly: the
/// represented hull has half-plane capacity 2 * total_time().
class MapChain {
 public:
  MapChain() = default;
  explicit MapChain(std::vector<ElementaryMap> maps);

  /// Appends a map; zero-duration maps are identities and are dropped.
  void push(const ElementaryMap& map);

  std::span<const ElementaryMap> maps() const { return maps_; }
  std::size_t size() const { return maps_.size(); }
  bool empty() const { return maps_.empty(); }
  double total_time() const { return total_time_; }

  /// The sub-chain of members [first, last).
  MapChain slice(std::size_t first, std::size_t last) const;

  Point forward(Point z, Side side = Side::None) const;
  Point inverse(Point w) const;
  Point eval(Point z, Direction direction, Side side = Side::None) const {
    return direction == Direction::Forward ? forward(z, side) : inverse(z);
  }

  /// Inverse of the first `count` members only, i.e. f_{t_count}.
  Point inverse_prefix(Point w, std::size_t count) const;

  /// Forward map restricted to the real axis; `side` selects the prime end
  /// when `x` sits on a slit base.
  double boundary_image(double x, Side side = Side::None) const;

  /// Boundary limit of f_T at the real point `x`, obtained from f_T(x + i eps)
  /// for eps in {1e-4, 5e-5} and Richardson extrapolation assuming an
  /// O(eps^2) leading error (the local behaviour at a critical point).
  Point inverse_boundary_limit(double x) const;

  /// Real interval [lo, hi] containing all slit bases and the accumulated hull's
  /// shadow on the real axis, plus the bound 2 sqrt(T) on its height.
  struct Extent {
    double lo = 0.0;
    double hi = 0.0;
    double height = 0.0;
  };
  Extent extent() const;

 private:
  std::vector<ElementaryMap> maps_;
  double total_time_ = 0.0;
};

/// Evaluate a chain at a point in the requested direction.
Point chain_eval(const MapChain& chain, Point z, Direction direction);

/// Half-plane capacity estimated from the expansion g(z) = z + b/z + ... on a
/// circle of radius `probe_radius` around the hull's centre. A non-positive
/// radius selects the default of 100 times the hull's size.
double hcap_moment(const MapChain& chain, double probe_radius = 0.0);

}  // namespace loewner
