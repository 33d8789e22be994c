#include "loewner/elementary_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace loewner {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kSlitTol = 1e-13;
// Series are used beyond these multiples of max(|a|, |b|); the truncation
// error there is below 1e-17 relative.
constexpr double kInverseFar = 8.0;
constexpr double kForwardFar = 10.0;

// Root of a monotone function on (lo, hi) by Newton steps safeguarded with
// bisection. `eval` returns (value, derivative); `increasing` fixes the sign
// convention of the bracket.
template <class Eval>
double monotone_root(Eval eval, double lo, double hi, double guess,
                     bool increasing) {
  double w = guess;
  if (!(w > lo && w < hi)) w = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    auto [value, slope] = eval(w);
    if (value == 0.0) return w;
    const bool above = increasing ? value > 0.0 : value < 0.0;
    if (above) {
      hi = w;
    } else {
      lo = w;
    }
    double next = w - value / slope;
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
    if (std::abs(next - w) <= 4.0 * kEps * (std::abs(w) + 1e-300) ||
        hi - lo <= 4.0 * kEps * (std::abs(lo) + std::abs(hi))) {
      return next;
    }
    w = next;
  }
  return w;
}

Point upper(Point w) {
  // Normalize a signed zero imaginary part so principal branches land in
  // the closed upper half-plane.
  if (w.imag() == 0.0) return {w.real(), 0.0};
  return w;
}

}  // namespace

double slit_angle(double coefficient) {
  return 0.5 * kPi * (1.0 - coefficient / std::sqrt(coefficient * coefficient + 16.0));
}

double sqrt_coefficient(double phi) {
  return 2.0 * (kPi - 2.0 * phi) / std::sqrt(phi * (kPi - phi));
}

double straight_tip_factor(double phi) {
  return 2.0 * std::pow(kPi / phi - 1.0, 0.5 - phi / kPi);
}

ElementaryMap::ElementaryMap(Kind kind, double base, double coefficient,
                             double duration)
    : kind_(kind), base_(base), coefficient_(coefficient), duration_(duration) {
  if (!(duration >= 0.0) || !std::isfinite(duration)) {
    throw DomainError("elementary map duration must be finite and >= 0");
  }
  if (!std::isfinite(base) || !std::isfinite(coefficient)) {
    throw DomainError("elementary map parameters must be finite");
  }
  const double root = std::sqrt(duration);
  if (kind == Kind::VerticalSlit) {
    coefficient_ = 0.0;
    alpha_ = 0.5;
    a_ = -2.0 * root;
    b_ = 2.0 * root;
    tip_preimage_ = 0.0;
    tip_local_ = {0.0, 2.0 * root};
    build_series();
    return;
  }
  const double s = std::sqrt(coefficient * coefficient + 16.0);
  alpha_ = 0.5 + 0.5 * coefficient / s;
  // Guard the degenerate limits alpha -> 0, 1 (slit tangent to the axis).
  if (!(alpha_ > 0.0 && alpha_ < 1.0)) {
    throw DomainError("tilted slit coefficient is too large in magnitude");
  }
  a_ = -2.0 * root * std::sqrt((1.0 - alpha_) / alpha_);
  b_ = 2.0 * root * std::sqrt(alpha_ / (1.0 - alpha_));
  tip_preimage_ = coefficient * root;
  const double modulus = std::pow(alpha_, alpha_) *
                         std::pow(1.0 - alpha_, 1.0 - alpha_) * (b_ - a_);
  tip_local_ = std::polar(modulus, angle());
  build_series();
}

void ElementaryMap::build_series() {
  // log(F(w)/w) = S(u), u = 1/w, S(u) = -sum_m p_m u^m / m with
  // p_m = alpha a^m + (1-alpha) b^m. exp(S) follows from n e_n = sum j s_j e_{n-j}.
  radius_ = std::max(-a_, b_);
  constexpr int n_max = kSeriesTerms;
  std::array<double, n_max + 1> s{};
  double pa = 1.0;
  double pb = 1.0;
  for (int m = 1; m <= n_max; ++m) {
    pa *= a_;
    pb *= b_;
    s[m] = -(alpha_ * pa + (1.0 - alpha_) * pb) / m;
  }
  std::array<double, n_max + 1> e{};
  e[0] = 1.0;
  for (int n = 1; n <= n_max; ++n) {
    double acc = 0.0;
    for (int j = 1; j <= n; ++j) acc += j * s[j] * e[n - j];
    e[n] = acc / n;
  }
  for (int n = 1; n <= n_max; ++n) laurent_[n - 1] = e[n];
}

Point ElementaryMap::series(Point u) const {
  // Horner in real arithmetic; std::complex multiplication carries NaN
  // recovery that dominates the cost here. Fewer terms suffice further out:
  // the truncation error is about (radius |u|)^(terms + 1).
  const double ur = u.real();
  const double ui = u.imag();
  const double q = std::norm(u) * radius_ * radius_;
  int terms = kSeriesTerms;
  if (q <= 1.0 / (64.0 * 64.0)) {
    terms = 9;
  } else if (q <= 1.0 / (32.0 * 32.0)) {
    terms = 11;
  } else if (q <= 1.0 / (16.0 * 16.0)) {
    terms = 14;
  }
  double re = laurent_[terms - 1];
  double im = 0.0;
  for (int n = terms - 2; n >= 0; --n) {
    const double next_re = re * ur - im * ui + laurent_[n];
    im = re * ui + im * ur;
    re = next_re;
  }
  return {re, im};
}

Point ElementaryMap::series_slope(Point u) const {
  // d/dw of sum_n laurent_[n-1] u^(n-1) = -u^2 sum_n (n-1) laurent_[n-1] u^(n-2).
  Point acc = static_cast<double>(kSeriesTerms - 1) * laurent_[kSeriesTerms - 1];
  for (int n = kSeriesTerms - 2; n >= 1; --n) acc = acc * u + static_cast<double>(n) * laurent_[n];
  return -u * u * acc;
}

ElementaryMap ElementaryMap::vertical(double base, double duration) {
  return ElementaryMap(Kind::VerticalSlit, base, 0.0, duration);
}

ElementaryMap ElementaryMap::tilted(double base, double coefficient,
                                    double duration) {
  return ElementaryMap(Kind::TiltedSlit, base, coefficient, duration);
}

ElementaryMap ElementaryMap::through(double base, Point target) {
  const Point p = target - base;
  const double r = std::abs(p);
  if (!(p.imag() > 1e-14 * r) || !std::isfinite(r)) {
    std::ostringstream msg;
    msg << "segment from " << base << " to (" << target.real() << ", "
        << target.imag() << ") does not enter the upper half-plane";
    throw GeometryError(msg.str());
  }
  const double phi = std::arg(p);
  const double factor = straight_tip_factor(phi);
  const double duration = (r / factor) * (r / factor);
  return tilted(base, sqrt_coefficient(phi), duration);
}

bool ElementaryMap::on_slit(Point z) const {
  if (is_identity()) return false;
  const Point local = z - base_;
  const double len = std::abs(tip_local_);
  const Point rotated = local * std::polar(1.0, -angle());
  const double tol = kSlitTol * (1.0 + len);
  return std::abs(rotated.imag()) <= tol && rotated.real() >= -tol &&
         rotated.real() <= len + tol;
}

Point ElementaryMap::inverse(Point w) const {
  if (is_identity()) return w;
  Point local = w - base_;
  if (local.imag() < 0.0) {
    if (local.imag() < -1e-12 * (1.0 + std::abs(local))) {
      throw DomainError("inverse slit map evaluated below the real axis");
    }
    local.imag(0.0);
  }
  return base_ + inverse_local(upper(local));
}

Point ElementaryMap::inverse_local(Point w) const {
  const double norm = std::norm(w);
  if (norm >= kInverseFar * kInverseFar * radius_ * radius_) {
    return w + series(Point(w.real() / norm, -w.imag() / norm));
  }
  if (kind_ == Kind::VerticalSlit) {
    const double h = b_;
    return std::sqrt(upper(w - h)) * std::sqrt(upper(w + h));
  }
  const double y = w.imag();
  const double xa = w.real() - a_;
  const double xb = w.real() - b_;
  const double ra = std::sqrt(xa * xa + y * y);
  if (ra == 0.0) return {0.0, 0.0};
  const double rb = std::sqrt(xb * xb + y * y);
  const double theta = alpha_ * std::atan2(y, xa) + (1.0 - alpha_) * std::atan2(y, xb);
  const double modulus = ra * std::pow(rb / ra, 1.0 - alpha_);
  return std::polar(modulus, theta);
}

Point ElementaryMap::forward(Point z, Side side) const {
  if (is_identity()) return z;
  const Point local = z - base_;
  const double scale = 1.0 + std::abs(local);
  if (local.imag() < -1e-12 * scale) {
    throw DomainError("forward slit map evaluated below the real axis");
  }
  if (local.imag() <= kSlitTol * scale) {
    return {boundary_forward(z.real(), side), 0.0};
  }
  if (on_slit(z)) {
    if (side == Side::None) {
      throw DomainError("point lies on the removed slit; a side is required");
    }
    auto [left, right] = prime_ends(z);
    return {side == Side::Left ? left : right, 0.0};
  }
  Point w = forward_local(local);
  if (w.imag() < 0.0) {
    if (w.imag() < -1e-10 * (1.0 + std::abs(w))) {
      throw BranchError("forward slit map produced a point below the real axis");
    }
    w.imag(0.0);
  }
  return base_ + w;
}

Point ElementaryMap::forward_local(Point z) const {
  if (kind_ == Kind::VerticalSlit) {
    Point s = std::sqrt(z * z + 4.0 * duration_);
    if (s.imag() < 0.0) s = -s;
    return s;
  }
  if (std::abs(z) >= kForwardFar * radius_) {
    Point w = z;
    for (int iter = 0; iter < 20; ++iter) {
      const Point u = 1.0 / w;
      const Point step = (w + series(u) - z) / (1.0 + series_slope(u));
      w -= step;
      if (std::abs(step) <= 2.0 * kEps * std::abs(w)) break;
    }
    if (w.imag() < 0.0) w.imag(0.0);
    return w;
  }
  const double gap = b_ - a_;
  // Starting points: far field (w ~ z), the quadratic model at the tip, and
  // the prime end of the nearest slit point pushed off the segment.
  const Point second = -tip_local_ / (alpha_ * (1.0 - alpha_) * gap * gap);
  Point near_tip = std::sqrt(2.0 * (z - tip_local_) / second);
  if (near_tip.imag() < 0.0) near_tip = -near_tip;
  near_tip += tip_preimage_;
  for (Point guess : {slit_guess(z), near_tip, z}) {
    Point w = guess;
    if (polish(z, w)) return w;
  }
  // Continuation from far above, where w ~ z is an excellent guess.
  const double lift = 4.0 * (std::abs(z) + gap);
  constexpr int stages = 64;
  Point w = z + Point(0.0, lift);
  for (int k = 0; k <= stages; ++k) {
    const double s = 1.0 - static_cast<double>(k) / stages;
    const Point zk = z + Point(0.0, lift * s * s);
    if (!polish(zk, w)) break;
    if (k == stages) return w;
  }
  throw BranchError("forward tilted-slit inversion did not converge");
}

Point ElementaryMap::slit_guess(Point z) const {
  const double len = std::abs(tip_local_);
  const Point rotated = z * std::polar(1.0, -angle());
  const double along = rotated.real();
  if (!(along > 1e-3 * len && along < len * (1.0 - 1e-3))) return z;
  const Point p = std::polar(along, angle());
  auto [left, right] = prime_ends(base_ + p);
  const double w0 = (rotated.imag() > 0.0 ? left : right) - base_;
  const Point slope = p * (alpha_ / (w0 - a_) + (1.0 - alpha_) / (w0 - b_));
  Point w = w0 + (z - p) / slope;
  if (!(w.imag() > 0.0)) w.imag(1e-3 * std::abs(z - p));
  return w;
}

bool ElementaryMap::polish(Point z, Point& w) const {
  if (!(w.imag() > 0.0) || !std::isfinite(w.real())) return false;
  const Point log_z = std::log(z);
  auto residual = [&](Point v) {
    return alpha_ * std::log(v - a_) + (1.0 - alpha_) * std::log(v - b_) - log_z;
  };
  const double gap = b_ - a_;
  Point r = residual(w);
  for (int iter = 0; iter < 60; ++iter) {
    if (std::abs(r) <= 4.0 * kEps) return true;
    const Point slope = alpha_ / (w - a_) + (1.0 - alpha_) / (w - b_);
    const Point step = r / slope;
    double damping = 1.0;
    Point next;
    Point r_next;
    bool improved = false;
    for (int k = 0; k < 40; ++k) {
      next = w - damping * step;
      if (next.imag() > 0.0) {
        r_next = residual(next);
        if (std::abs(r_next) < std::abs(r)) {
          improved = true;
          break;
        }
      }
      damping *= 0.5;
    }
    if (!improved) return std::abs(r) <= 1e-13;
    const double moved = std::abs(next - w);
    w = next;
    r = r_next;
    if (moved <= 8.0 * kEps * (std::abs(w) + gap)) return std::abs(r) <= 1e-12;
  }
  return std::abs(r) <= 1e-12;
}

double ElementaryMap::boundary_forward(double x, Side side) const {
  if (is_identity()) return x;
  const double local = x - base_;
  if (std::abs(local) <= kSlitTol * (1.0 + std::abs(x))) {
    if (side == Side::Left) return base_ + a_;
    if (side == Side::Right) return base_ + b_;
    throw DomainError("real point coincides with a slit base; a side is required");
  }
  return base_ + solve_on_real_axis(local);
}

double ElementaryMap::solve_on_real_axis(double x) const {
  if (kind_ == Kind::VerticalSlit) {
    return std::copysign(std::sqrt(x * x + 4.0 * duration_), x);
  }
  const double target = std::log(std::abs(x));
  if (x > 0.0) {
    auto eval = [&](double w) {
      return std::pair{alpha_ * std::log(w - a_) + (1.0 - alpha_) * std::log(w - b_) - target,
                       alpha_ / (w - a_) + (1.0 - alpha_) / (w - b_)};
    };
    const double lo = std::max(b_, x + a_);
    const double hi = x + b_;
    return monotone_root(eval, lo, hi, x + 2.0 * duration_ / x, true);
  }
  auto eval = [&](double w) {
    return std::pair{alpha_ * std::log(a_ - w) + (1.0 - alpha_) * std::log(b_ - w) - target,
                     -alpha_ / (a_ - w) - (1.0 - alpha_) / (b_ - w)};
  };
  const double lo = a_ + x;
  const double hi = std::min(a_, b_ + x);
  return monotone_root(eval, lo, hi, x + 2.0 * duration_ / x, false);
}

std::pair<double, double> ElementaryMap::prime_ends(Point on_slit_point) const {
  if (is_identity()) return {on_slit_point.real(), on_slit_point.real()};
  const double radius = std::abs(on_slit_point - base_);
  return {base_ + solve_on_segment(radius, true), base_ + solve_on_segment(radius, false)};
}

double ElementaryMap::solve_on_segment(double radius, bool left) const {
  const double len = std::abs(tip_local_);
  if (radius >= len * (1.0 - 4.0 * kEps)) return tip_preimage_;
  if (radius <= 0.0) return left ? a_ : b_;
  if (kind_ == Kind::VerticalSlit) {
    const double w = std::sqrt(std::max(0.0, 4.0 * duration_ - radius * radius));
    return left ? -w : w;
  }
  const double target = std::log(radius);
  auto eval = [&](double w) {
    return std::pair{alpha_ * std::log(w - a_) + (1.0 - alpha_) * std::log(b_ - w) - target,
                     alpha_ / (w - a_) - (1.0 - alpha_) / (b_ - w)};
  };
  if (left) {
    return monotone_root(eval, a_, tip_preimage_, 0.5 * (a_ + tip_preimage_), true);
  }
  return monotone_root(eval, tip_preimage_, b_, 0.5 * (b_ + tip_preimage_), false);
}

}  // namespace loewner
