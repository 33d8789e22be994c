#pragma once

#include <array>
#include <utility>

#include "loewner/types.hpp"

namespace loewner {

/// Angle of the straight slit generated by the driving U(t) = c·sqrt(t).
double slit_angle(double coefficient);

/// Inverse of `slit_angle`: the sqrt-driving coefficient producing a straight
/// slit at angle `phi` in (0, pi).
double sqrt_coefficient(double phi);

/// |gamma(t)| / sqrt(t) for the straight slit at angle `phi`.
double straight_tip_factor(double phi);

/// One exact step of the chordal one-slit equation.
///
/// A map of duration d removes a straight segment starting at `base()` and
/// ending at `tip()`; its half-plane capacity is exactly 2d. The vertical kind
/// is driven by a constant, the tilted kind by U(t) = base + c·sqrt(t). The
/// forward map g sends the removed segment's tip to `tip_image()`.
///
/// In local coordinates the inverse map is F(w) = (w - a)^alpha (w - b)^(1-alpha)
/// with alpha = 1 - angle/pi and a < 0 < b chosen so that F(w) = w - 2d/w + ...
class ElementaryMap {
 public:
  enum class Kind { VerticalSlit, TiltedSlit };

  static ElementaryMap vertical(double base, double duration);
  static ElementaryMap tilted(double base, double coefficient, double duration);

  /// The unique elementary map whose removed segment is the straight segment
  /// from `base` (real) to `target` (in H).
  static ElementaryMap through(double base, Point target);

  Kind kind() const { return kind_; }
  double base() const { return base_; }
  double coefficient() const { return coefficient_; }
  double duration() const { return duration_; }
  bool is_identity() const { return duration_ == 0.0; }

  double angle() const { return (1.0 - alpha_) * kPi; }
  Point tip() const { return base_ + tip_local_; }
  double tip_image() const { return base_ + tip_preimage_; }
  /// Images of the two prime ends at the base of the removed segment.
  double left_foot() const { return base_ + a_; }
  double right_foot() const { return base_ + b_; }

  /// g: (H minus segment) -> H. A point on the segment needs a side tag.
  Point forward(Point z, Side side = Side::None) const;
  /// f = g^{-1}: closed H -> closed H minus segment.
  Point inverse(Point w) const;
  Point eval(Point z, Direction direction, Side side = Side::None) const {
    return direction == Direction::Forward ? forward(z, side) : inverse(z);
  }

  /// Forward map restricted to the real axis.
  double boundary_forward(double x, Side side = Side::None) const;

  /// The two real preimages (left side, right side) of a point on the removed
  /// segment.
  std::pair<double, double> prime_ends(Point on_slit) const;

  /// True when `z` lies on the removed segment within tolerance.
  bool on_slit(Point z) const;

 private:
  ElementaryMap(Kind kind, double base, double coefficient, double duration);

  Point forward_local(Point z) const;
  bool polish(Point z, Point& w) const;
  Point slit_guess(Point z) const;
  Point inverse_local(Point w) const;
  double solve_on_real_axis(double x) const;
  double solve_on_segment(double radius, bool left) const;
  void build_series();
  Point series(Point u) const;
  Point series_slope(Point u) const;

  // Far field: F(w) = w + sum_n laurent_[n-1] w^(1-n), used for |w| beyond
  // kFarFactor * radius_.
  static constexpr int kSeriesTerms = 18;

  Kind kind_;
  double base_;
  double coefficient_;
  double duration_;
  double alpha_ = 0.5;
  double a_ = 0.0;
  double b_ = 0.0;
  double tip_preimage_ = 0.0;
  Point tip_local_{0.0, 0.0};
  double radius_ = 0.0;
  std::array<double, kSeriesTerms> laurent_{};
};

}  // namespace loewner
