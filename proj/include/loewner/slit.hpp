#pragma once

#include <vector>

#include "loewner/driving.hpp"
#include "loewner/map_chain.hpp"

namespace loewner {

/// An ordered simple curve from a real base point into H.
struct SlitPolyline {
  std::vector<Point> vertices;

  Point base() const { return vertices.front(); }
  Point tip() const { return vertices.back(); }
  double diameter() const;
  double height() const;
  double length() const;
  SlitPolyline scaled(double factor) const;
  SlitPolyline translated(double shift) const;
  SlitPolyline reflected() const;
  /// Initial arc of the given fraction of the length, in (0, 1].
  SlitPolyline arc_prefix(double fraction) const;
};

/// Throws GeometryError unless the first vertex is real, all others lie in H
/// and no two non-adjacent segments intersect (tolerance 1e-12).
void validate_slit(const SlitPolyline& slit);

/// Smallest distance between points of two polylines.
double polyline_distance(const std::vector<Point>& a, const std::vector<Point>& b);

/// Hausdorff distance between two polylines (vertices and segment midpoints
/// against segments).
double hausdorff(const std::vector<Point>& a, const std::vector<Point>& b);

/// Samples (t, gamma(t)) of a slit in its Loewner parameterization.
struct ParameterizedSlit {
  std::vector<double> times;
  std::vector<Point> points;
  double total = 0.0;
};

struct PeelResult {
  /// PiecewiseSqrt driving: each peeled piece is one tilted-slit step.
  SampledDriving driving;
  ParameterizedSlit parameterized;
  /// The elementary maps peeled, in order; their composition is g_T.
  MapChain chain;
  /// The first piece was tangent to R and was lifted to the flattest angle
  /// the tilted closed form resolves (1e-12 rad).
  bool degenerate_start = false;
};

/// Zipper peeling of a slit into elementary maps whose removed segments pass
/// exactly through the images of the (possibly subdivided) vertices. Any
/// piece whose hcap-time would exceed `dcap` is split at its midpoint.
PeelResult drive_from_slit(const SlitPolyline& slit, double dcap = 1e-3);

/// Half-plane capacity 2T from peeling.
double hcap_of_slit(const SlitPolyline& slit, double dcap = 1e-3);

/// `samples` points of the slit on a uniform grid in hcap-time.
ParameterizedSlit reparameterize_by_hcap(const SlitPolyline& slit, int samples,
                                         double dcap = 1e-3);

/// Same, from an existing peel.
ParameterizedSlit reparameterize_by_hcap(const PeelResult& peel, int samples);

/// Point of the peeled slit at hcap-time t.
Point point_at_time(const PeelResult& peel, double t);

}  // namespace loewner
