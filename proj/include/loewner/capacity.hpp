#pragma once

#include <cstdint>
#include <vector>

#include "loewner/slit.hpp"

namespace loewner {

/// Area of the union of the disks B(x + iy, y) over all points x + iy of the
/// slits, counted on horizontal scanlines `resolution` apart. Slit points are
/// densified finely enough that the gaps between neighbouring disks change the
/// area by O(resolution). Zero for no slits.
double hsiz(const std::vector<SlitPolyline>& slits, double resolution = 1e-3);

struct MonteCarloOptions {
  std::int64_t walkers = 100000;
  std::uint64_t seed = 1;
  /// Radius R of the start semicircle around the hull's midpoint; 0 selects
  /// twice the hull radius.
  double start_radius = 0.0;
  /// Walks stop within shell * R of the boundary.
  double shell = 1e-5;
};

struct MonteCarloEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
  std::int64_t walkers = 0;
  double start_radius = 0.0;
};

/// hcap(A) = (2R / pi) int_0^pi E^{R e^{i theta}}[Im B_tau] sin(theta) d theta
/// for a hull inside the semicircle of radius R, with B run by walk-on-spheres
/// until it is within the shell of R or of a slit. Every walker draws from its
/// own generator seeded from (seed, index), so the result does not depend on
/// the thread count.
MonteCarloEstimate hcap_monte_carlo(const std::vector<SlitPolyline>& slits,
                                    const MonteCarloOptions& options = {});

}  // namespace loewner
