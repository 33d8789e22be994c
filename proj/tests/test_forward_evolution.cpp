#include <cmath>
#include <random>

#include "doctest.h"
#include "loewner/constructions.hpp"
#include "loewner/ode.hpp"
#include "loewner/trace.hpp"

using namespace loewner;

namespace {

Point straight_tip(double phi, double t) {
  return 2.0 * std::sqrt(t) * std::pow(kPi / phi - 1.0, 0.5 - phi / kPi) * std::polar(1.0, phi);
}

SampledDriving smooth_driving(std::mt19937_64& rng, double horizon, int samples) {
  std::uniform_real_distribution<double> amp(-0.6, 0.6);
  std::uniform_real_distribution<double> freq(0.5, 4.0);
  const double a = amp(rng), b = amp(rng), w = freq(rng), s = amp(rng);
  return SampledDriving::sample(
      [=](double t) { return a * std::sqrt(t) + b * std::sin(w * t) + s * t; }, horizon, samples);
}

// Adaptive DP45 integration of the backward equation dh/dt = -2 / (h - U(t)).
Point integrate_backward(Point z, const SteerResult& steer) {
  auto rhs = [&](double t, Point h) { return -2.0 / (h - steer.value(t)); };
  double t = 0.0;
  double h = 1e-3;
  Point y = z;
  while (t < steer.t_star) {
    h = std::min(h, steer.t_star - t);
    Point next;
    const double err = dormand_prince_step(rhs, t, y, h, next);
    if (err <= 1e-13) {
      t += h;
      y = next;
    }
    h *= std::clamp(0.9 * std::pow(1e-13 / std::max(err, 1e-300), 0.2), 0.2, 5.0);
  }
  return y;
}

}  // namespace

TEST_CASE("driving validation and interpolation") {
  CHECK_THROWS_AS(SampledDriving({0.0, 1.0}, {0.0}, Interp::Linear), DomainError);
  CHECK_THROWS_AS(SampledDriving({0.1, 1.0}, {0.0, 0.0}, Interp::Linear), DomainError);
  CHECK_THROWS_AS(SampledDriving({0.0, 1.0, 1.0}, {0.0, 0.0, 0.0}, Interp::Linear), DomainError);
  CHECK_THROWS_AS(SampledDriving({0.0, 1.0}, {0.0, NAN}, Interp::Linear), DomainError);

  const SampledDriving lin({0.0, 1.0, 2.0}, {0.0, 2.0, 0.0}, Interp::Linear);
  CHECK(lin(0.5) == doctest::Approx(1.0));
  CHECK(lin(1.5) == doctest::Approx(1.0));
  CHECK_THROWS_AS(lin(2.5), DomainError);

  const SampledDriving step({0.0, 1.0, 2.0}, {0.0, 2.0, 0.0}, Interp::PiecewiseConstant);
  CHECK(step(0.99) == 0.0);
  CHECK(step(1.5) == 2.0);

  const auto root = SampledDriving::sqrt_driving(std::sqrt(2.0), 1.0);
  CHECK(root(0.25) == doctest::Approx(std::sqrt(2.0) * 0.5).epsilon(1e-15));
  CHECK(root.coefficient(0) == doctest::Approx(std::sqrt(2.0)));

  CHECK(parse_interp("sqrt") == Interp::PiecewiseSqrt);
  CHECK(parse_interp(to_string(Interp::Linear)) == Interp::Linear);
  CHECK_THROWS_AS(parse_interp("cubic"), DomainError);

  const auto scaled = lin.transformed(2.0, 1.0, true);
  CHECK(scaled.horizon() == doctest::Approx(8.0));
  CHECK(scaled(4.0) == doctest::Approx(-2.0 * 2.0 + 1.0));
}

TEST_CASE("multi-slit system validation") {
  const auto left = SampledDriving::constant(-1.0, 1.0);
  const auto right = SampledDriving::constant(1.0, 1.0);
  CHECK_NOTHROW(MultiSlitSystem({0.5, 0.5}, {left, right}));
  CHECK_THROWS_AS(MultiSlitSystem({0.5, 0.6}, {left, right}), DomainError);
  CHECK_THROWS_AS(MultiSlitSystem({0.0, 1.0}, {left, right}), DomainError);
  CHECK_THROWS_AS(MultiSlitSystem({0.5, 0.5}, {right, left}), DomainError);
  CHECK_THROWS_AS(MultiSlitSystem({0.5, 0.5}, {left, SampledDriving::constant(1.0, 2.0)}),
                  DomainError);
}

TEST_CASE("zero driving traces the vertical slit of height 2 sqrt(T)") {
  const auto r = trace_single(SampledDriving::constant(0.0, 1.0), 1000);
  const Point tip = r.curves[0].points.back();
  CHECK(std::abs(tip - Point(0.0, 2.0)) < 1e-3);
  CHECK(r.chain.total_time() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r.curves[0].points.size() == 1001);
}

TEST_CASE("sqrt driving traces the straight slit") {
  const auto r = trace_single(SampledDriving::sqrt_driving(std::sqrt(2.0), 1.0), 1000);
  const Point tip = r.curves[0].points.back();
  CHECK(tip.real() == doctest::Approx(1.12246).epsilon(1e-4));
  CHECK(tip.imag() == doctest::Approx(1.94413).epsilon(1e-4));
  for (double phi : {kPi / 6, kPi / 3, kPi / 2, 2 * kPi / 3}) {
    CAPTURE(phi);
    const auto u = SampledDriving::sqrt_driving(sqrt_coefficient(phi), 1.0);
    const auto trace = trace_single(u, 400);
    const Point expected = straight_tip(phi, 1.0);
    CHECK(std::abs(trace.curves[0].points.back() - expected) < 1e-2 * std::abs(expected));
  }
}

TEST_CASE("refinement: doubling the steps halves the tip error on smooth drivings") {
  const auto u = SampledDriving::sample(
      [](double t) { return 0.8 * std::sin(2.5 * t) + 0.3 * t; }, 1.0, 6400);
  const Point reference = trace_single(u, 6400).curves[0].points.back();
  double previous = 0.0;
  for (int steps : {50, 100, 200, 400}) {
    const double err = std::abs(trace_single(u, steps).curves[0].points.back() - reference);
    CAPTURE(steps);
    if (previous > 0.0) CHECK(err <= 0.5 * previous);
    previous = err;
  }
}

TEST_CASE("refinement: sqrt driving converges at first order up to a logarithm") {
  // The sqrt singularity at t = 0 adds a log(N) / N term, so the error ratio
  // approaches 1/2 from above (0.518, 0.512, 0.508, 0.506 for N = 50..800).
  const Point expected = straight_tip(kPi / 3, 1.0);
  const auto u = SampledDriving::sqrt_driving(std::sqrt(2.0), 1.0);
  double previous = 0.0;
  for (int steps : {50, 100, 200, 400, 800}) {
    const double err = std::abs(trace_single(u, steps).curves[0].points.back() - expected);
    CAPTURE(steps);
    if (previous > 0.0) {
      CHECK(err < previous);
      CHECK(err <= 0.52 * previous);
    }
    previous = err;
  }
}

TEST_CASE("property: trace heights stay below 2 sqrt(T)") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    std::uniform_real_distribution<double> horizon(0.2, 3.0);
    const double T = horizon(rng);
    const auto u = smooth_driving(rng, T, 200);
    const auto r = trace_single(u, 200);
    for (const Point& p : r.curves[0].points) {
      CHECK(p.imag() <= 2.0 * std::sqrt(T) * (1.0 + 1e-3));
      CHECK(p.imag() >= 0.0);
    }
  }
}

TEST_CASE("property: scaling, translation and reflection covariance") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const auto u = smooth_driving(rng, 1.0, 300);
    const auto base = trace_single(u, 300).curves[0].points;
    const double d = 2.5;
    const auto scaled = trace_single(u.transformed(d, 0.0), 300).curves[0].points;
    const auto shifted = trace_single(u.transformed(1.0, 0.7), 300).curves[0].points;
    const auto mirrored = trace_single(u.transformed(1.0, 0.0, true), 300).curves[0].points;
    double worst = 0.0;
    for (std::size_t i = 0; i < base.size(); ++i) {
      worst = std::max(worst, std::abs(scaled[i] - d * base[i]));
      worst = std::max(worst, std::abs(shifted[i] - (base[i] + 0.7)));
      worst = std::max(worst, std::abs(mirrored[i] + std::conj(base[i])));
    }
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("truncation consistency: the tail trace is the g_s image of the full trace") {
  std::mt19937_64 rng(3);
  const auto u = smooth_driving(rng, 1.0, 400);
  const int steps = 400;
  const int split = 150;
  const auto full = trace_single(u, steps);
  const double s = full.curves[0].times[split];
  std::vector<double> times;
  std::vector<double> values;
  for (int i = split; i <= steps; ++i) {
    times.push_back(full.curves[0].times[i] - s);
    values.push_back(u(full.curves[0].times[i]));
  }
  times.front() = 0.0;
  const SampledDriving tail(times, values, Interp::Linear);
  const auto g_s = full.chain_at(split);
  const auto tail_trace = trace_single(tail, steps - split);
  double worst = 0.0;
  for (int i = split + 1; i <= steps; ++i) {
    const Point image = g_s.forward(full.curves[0].points[i]);
    worst = std::max(worst, std::abs(image - tail_trace.curves[0].points[i - split]));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("multi-slit trace with a degenerate weight reduces to one slit") {
  // Splitting moves the weightless base by O(1/steps) before the big slit's
  // sub-step catches up, so the diameter bound needs a fine grid.
  const int steps = 2000;
  const auto u1 = SampledDriving::sqrt_driving(std::sqrt(2.0), 1.0);
  const auto single = trace_single(u1, steps);
  // The second driving follows g_t(3), so the weightless slit stays at the
  // point 3 instead of sliding along R with the flow.
  std::vector<double> values;
  for (int i = 0; i <= steps; ++i) values.push_back(single.chain_at(i).boundary_image(3.0));
  const SampledDriving u2(single.curves[0].times, values, Interp::Linear);
  const auto multi = trace_multi(MultiSlitSystem({1.0 - 1e-9, 1e-9}, {u1, u2}), steps);
  double worst = 0.0;
  for (std::size_t i = 0; i < single.curves[0].points.size(); ++i) {
    worst = std::max(worst, std::abs(multi.curves[0].points[i] - single.curves[0].points[i]));
  }
  CHECK(worst < 1e-3);
  double diameter = 0.0;
  for (const Point& p : multi.curves[1].points) {
    diameter = std::max(diameter, std::abs(p - multi.curves[1].points.front()));
  }
  CHECK(diameter < 1e-3);

  // With a frozen second driving the weightless hull is a thin sliver along R.
  const auto frozen = trace_multi(
      MultiSlitSystem({1.0 - 1e-9, 1e-9}, {u1, SampledDriving::constant(3.0, 1.0)}), steps);
  for (const Point& p : frozen.curves[1].points) CHECK(p.imag() < 1e-3);
}

TEST_CASE("symmetric multi-slit system traces mirror images") {
  const MultiSlitSystem sys({0.5, 0.5}, {SampledDriving::constant(-1.0, 1.0),
                                         SampledDriving::constant(1.0, 1.0)});
  const auto r = trace_multi(sys, 1000);
  double worst = 0.0;
  for (std::size_t i = 0; i < r.curves[0].points.size(); ++i) {
    worst = std::max(worst, std::abs(r.curves[0].points[i] + std::conj(r.curves[1].points[i])));
  }
  CHECK(worst < 1e-3);
}

TEST_CASE("multi-slit capacity bookkeeping matches the moment estimate") {
  std::mt19937_64 rng(17);
  auto a = smooth_driving(rng, 1.0, 200);
  auto b = smooth_driving(rng, 1.0, 200).transformed(1.0, 3.0);
  const MultiSlitSystem sys({0.3, 0.7}, {a, b});
  const int steps = 400;
  const auto r = trace_multi(sys, steps);
  for (int i : {steps / 4, steps / 2, steps}) {
    const double t = r.curves[0].times[i];
    const auto chain = r.chain_at(i);
    CHECK(chain.total_time() == doctest::Approx(t).epsilon(1e-12));
    CHECK(hcap_moment(chain) == doctest::Approx(2.0 * t).epsilon(1e-3));
  }
  CHECK(r.curves[0].own_time.back() == doctest::Approx(0.3));
  for (const auto& c : r.curves) {
    for (const Point& p : c.points) CHECK(p.imag() <= 2.0 * (1.0 + 1e-3));
  }
}

TEST_CASE("tip images closer than the separation floor raise CollisionError") {
  const auto left = SampledDriving::sample([](double t) { return -1.0 + 0.95 * t; }, 1.0, 10);
  const auto right = SampledDriving::constant(0.0, 1.0);
  const MultiSlitSystem sys({0.5, 0.5}, {left, right});
  CHECK_NOTHROW(trace_multi(sys, 50));
  TraceOptions wide;
  wide.collision_floor = 0.2;
  CHECK_THROWS_AS(trace_multi(sys, 50, wide), CollisionError);
}

TEST_CASE("refinement check accepts regular drivings and rejects wild ones") {
  TraceOptions check;
  check.refinement_check = true;
  CHECK_NOTHROW(trace_single(SampledDriving::sqrt_driving(1.0, 1.0), 100, check));
  std::vector<double> t;
  std::vector<double> v;
  for (int i = 0; i <= 80; ++i) {
    t.push_back(i / 80.0);
    v.push_back(i % 2 == 0 ? 0.0 : 40.0);
  }
  CHECK_THROWS_AS(trace_single(SampledDriving(t, v, Interp::PiecewiseConstant), 40, check),
                  StepError);
}

TEST_CASE("steering through a point") {
  SUBCASE("vertical") {
    const auto s = steer_through({0.0, 1.0}, {0.0, 2.0});
    CHECK(s.slope == 0.0);
    CHECK(s.t_star == doctest::Approx(0.75));
    CHECK(s.driving.max_value() == doctest::Approx(0.0));
    CHECK(s.driving.min_value() == doctest::Approx(0.0));
  }
  SUBCASE("slope one") {
    const auto s = steer_through({0.0, 1.0}, {1.0, 2.0});
    CHECK(s.slope == doctest::Approx(1.0));
    CHECK(s.t_star == doctest::Approx(1.5));
    for (double t : {0.0, 0.3, 1.0, 1.5}) {
      CHECK(s.value(t) == doctest::Approx(2.0 * std::sqrt(2.0 * t + 1.0) - 1.0));
      CHECK(s.driving(t) == doctest::Approx(2.0 * std::sqrt(2.0 * t + 1.0) - 1.0).epsilon(1e-6));
    }
  }
  SUBCASE("same point") {
    const auto s = steer_through({0.5, 1.0}, {0.5, 1.0});
    CHECK(s.t_star == 0.0);
    CHECK(s.driving.horizon() == 0.0);
  }
  SUBCASE("unreachable") {
    CHECK_THROWS_AS(steer_through({0.0, 2.0}, {0.0, 1.0}), DomainError);
  }
  SUBCASE("backward flow passes through the target") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> x(-2.0, 2.0);
    std::uniform_real_distribution<double> y(0.1, 2.0);
    for (int trial = 0; trial < 10; ++trial) {
      const Point z0(x(rng), y(rng));
      const Point z1(x(rng), z0.imag() + y(rng));
      const auto s = steer_through(z0, z1);
      CHECK(std::abs(integrate_backward(z0, s) - z1) < 1e-6);
    }
  }
}

TEST_CASE("self-similar zigzag driving") {
  const auto u = self_similar_zigzag(5.0, 20);
  CHECK(u(0.25) == doctest::Approx(5.0 * std::sqrt(0.75)).epsilon(1e-14));
  CHECK(u(0.25) == doctest::Approx(4.33013).epsilon(1e-6));
  double quotient = 0.0;
  for (int n = 0; n < 20; ++n) {
    const double r = 1.0 - std::ldexp(1.0, -n);
    const double w = 1.0 - 3.0 * std::ldexp(1.0, -(n + 2));
    CHECK(u(r) == 0.0);
    quotient = std::max(quotient, std::abs(u(w)) / std::sqrt(1.0 - w));
  }
  CHECK(quotient == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(u(1.0) == 0.0);
  CHECK_THROWS_AS(self_similar_zigzag(0.0, 3), DomainError);
}

TEST_CASE("hitting angle formula") {
  CHECK(hitting_angle(5.0) == doctest::Approx(kPi / 4).epsilon(1e-14));
  CHECK(hitting_angle(4.0) == doctest::Approx(kPi));
  CHECK_THROWS_AS(hitting_angle(3.0), DomainError);
}
