#include <cmath>
#include <random>

#include "doctest.h"
#include "loewner/slit.hpp"
#include "loewner/trace.hpp"
#include "test_support.hpp"

using namespace loewner;
using loewner::testing::random_polyline;

namespace {

SlitPolyline segment(Point from, Point to) { return SlitPolyline{{from, to}}; }

template <class F>
double sup_difference(const SampledDriving& a, F b, double horizon, int samples = 4000) {
  horizon = std::min(a.horizon(), horizon);
  double worst = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double t = horizon * i / samples;
    worst = std::max(worst, std::abs(a(t) - b(t)));
  }
  return worst;
}

double sup_difference(const SampledDriving& a, const SampledDriving& b, int samples = 4000) {
  return sup_difference(a, [&](double t) { return b(t); }, b.horizon(), samples);
}

SlitPolyline trace_polyline(const SampledDriving& u, int steps) {
  return SlitPolyline{trace_single(u, steps).curves[0].points};
}

}  // namespace

TEST_CASE("slit validation") {
  CHECK_THROWS_AS(validate_slit(SlitPolyline{{{0.0, 0.0}}}), GeometryError);
  CHECK_THROWS_AS(validate_slit(segment({0.0, 0.1}, {0.0, 1.0})), GeometryError);
  CHECK_THROWS_AS(validate_slit(SlitPolyline{{{0.0, 0.0}, {1.0, 1.0}, {2.0, 0.0}}}),
                  GeometryError);
  CHECK_THROWS_AS(validate_slit(SlitPolyline{{{0.0, 0.0}, {0.0, 1.0}, {0.0, 1.0}}}),
                  GeometryError);
  const SlitPolyline loop{{{0.0, 0.0}, {0.0, 2.0}, {1.0, 2.0}, {1.0, 1.0}, {-1.0, 1.0}}};
  CHECK_THROWS_AS(validate_slit(loop), GeometryError);
  CHECK_NOTHROW(validate_slit(SlitPolyline{{{0.0, 0.0}, {0.0, 2.0}, {1.0, 2.0}, {1.0, 1.0}}}));
}

TEST_CASE("polyline distances") {
  const std::vector<Point> a{{0.0, 0.0}, {0.0, 1.0}};
  const std::vector<Point> b{{1.0, 0.0}, {1.0, 1.0}};
  CHECK(polyline_distance(a, b) == doctest::Approx(1.0));
  CHECK(hausdorff(a, b) == doctest::Approx(1.0));
  const std::vector<Point> c{{0.0, 0.0}, {0.0, 0.5}, {0.0, 1.0}};
  CHECK(hausdorff(a, c) < 1e-15);
  CHECK(hausdorff(a, {{0.0, 0.0}, {0.0, 2.0}}) == doctest::Approx(1.0));
}

TEST_CASE("vertical segment peels to the zero driving") {
  const auto peel = drive_from_slit(segment({0.0, 0.0}, {0.0, 2.0}));
  CHECK(peel.parameterized.total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::max(std::abs(peel.driving.min_value()), std::abs(peel.driving.max_value())) < 1e-3);
  CHECK(peel.driving.horizon() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(peel.degenerate_start);
}

TEST_CASE("straight segment at angle pi/3 peels to sqrt(2) sqrt(t)") {
  for (double length : {0.3, 1.0, 4.0}) {
    CAPTURE(length);
    const auto peel = drive_from_slit(segment({0.0, 0.0}, std::polar(length, kPi / 3)),
                                      1e-3 * length * length);
    const double factor = straight_tip_factor(kPi / 3);
    const double expected_total = std::pow(length / factor, 2);
    CHECK(peel.parameterized.total == doctest::Approx(expected_total).epsilon(1e-4));
    double worst = 0.0;
    double scale = 0.0;
    for (int i = 0; i <= 2000; ++i) {
      const double t = peel.parameterized.total * i / 2000;
      const double exact = std::sqrt(2.0 * t);
      worst = std::max(worst, std::abs(peel.driving(t) - exact));
      scale = std::max(scale, exact);
    }
    CHECK(worst / scale < 1e-2);
    for (std::size_t i = 0; i < peel.driving.size(); ++i) {
      const double t = peel.driving.times()[i];
      CHECK(peel.driving.values()[i] == doctest::Approx(std::sqrt(2.0 * t)).epsilon(1e-2));
    }
  }
}

TEST_CASE("half-plane capacity of slits") {
  CHECK(hcap_of_slit(segment({0.0, 0.0}, {0.0, 1.0})) == doctest::Approx(0.5).epsilon(1e-12));
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 5; ++trial) {
    const auto slit = random_polyline(rng, 6);
    const double h = hcap_of_slit(slit);
    CHECK(hcap_of_slit(slit.scaled(2.0)) == doctest::Approx(4.0 * h).epsilon(1e-2));
    CHECK(hcap_of_slit(slit.translated(3.7)) == doctest::Approx(h).epsilon(1e-6));
    CHECK(hcap_of_slit(slit.reflected()) == doctest::Approx(h).epsilon(1e-6));
    const auto peel = drive_from_slit(slit);
    CHECK(hcap_moment(peel.chain) == doctest::Approx(h).epsilon(1e-3));
  }
}

TEST_CASE("reparameterization by half-plane capacity") {
  const auto p = reparameterize_by_hcap(segment({0.0, 0.0}, {0.0, 2.0}), 3);
  REQUIRE(p.times.size() == 3);
  CHECK(p.times[0] == 0.0);
  CHECK(p.times[1] == doctest::Approx(0.5));
  CHECK(p.times[2] == doctest::Approx(1.0));
  CHECK(std::abs(p.points[1] - Point(0.0, std::sqrt(2.0))) < 1e-9);
  CHECK(p.points.front() == Point(0.0, 0.0));
  CHECK(p.points.back() == Point(0.0, 2.0));
  CHECK_THROWS_AS(reparameterize_by_hcap(segment({0.0, 0.0}, {0.0, 2.0}), 1), DomainError);

  std::mt19937_64 rng(2);
  const auto slit = random_polyline(rng, 10);
  const auto q = reparameterize_by_hcap(slit, 50);
  for (std::size_t i = 1; i < q.times.size(); ++i) CHECK(q.times[i] > q.times[i - 1]);
  // Each sample's prefix has capacity 2t: peel the sub-slit up to a sample.
  const auto peel = drive_from_slit(slit);
  for (int i : {10, 25, 40}) {
    const double t = q.times[i];
    const std::size_t seg = peel.driving.segment(t);
    std::vector<Point> prefix(peel.parameterized.points.begin(),
                              peel.parameterized.points.begin() + seg + 1);
    prefix.push_back(q.points[i]);
    CHECK(2.0 * drive_from_slit(SlitPolyline{prefix}).parameterized.total ==
          doctest::Approx(2.0 * t).epsilon(2e-3));
  }
}

TEST_CASE("property: capacity additivity under peeling") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 5; ++trial) {
    // Dense vertices, so the mapped remainder is well approximated by a polyline.
    const auto coarse = random_polyline(rng, 6);
    const auto dense = reparameterize_by_hcap(coarse, 201);
    const SlitPolyline slit{dense.points};
    const std::size_t cut = 60 + trial * 20;
    const SlitPolyline first{{slit.vertices.begin(), slit.vertices.begin() + cut + 1}};
    const auto peel_first = drive_from_slit(first);
    std::vector<Point> rest{Point(peel_first.chain.maps().back().tip_image(), 0.0)};
    for (std::size_t i = cut + 1; i < slit.vertices.size(); ++i) {
      rest.push_back(peel_first.chain.forward(slit.vertices[i]));
    }
    const double whole = drive_from_slit(slit).parameterized.total;
    const double parts =
        peel_first.parameterized.total + drive_from_slit(SlitPolyline{rest}).parameterized.total;
    CHECK(parts == doctest::Approx(whole).epsilon(1e-3));
  }
}

TEST_CASE("round trip: peeling a traced curve returns its driving") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> amp(-0.7, 0.7);
  std::uniform_real_distribution<double> freq(0.5, 5.0);
  for (int trial = 0; trial < 4; ++trial) {
    const double a = amp(rng), b = amp(rng), w = freq(rng), tau = 0.1 + 0.1 * trial;
    auto f = [=](double t) { return a * (std::sqrt(t + tau) - std::sqrt(tau)) + b * std::sin(w * t); };
    double previous = 0.0;
    for (int steps : {250, 500}) {
      const auto u = SampledDriving::sample(f, 1.0, steps);
      const auto peel = drive_from_slit(trace_polyline(u, steps), 1.0 / steps);
      CHECK(peel.parameterized.total == doctest::Approx(1.0).epsilon(1e-9));
      const double err = sup_difference(peel.driving, f, 1.0);
      CAPTURE(steps);
      CHECK(err < 5e-2);
      if (previous > 0.0) CHECK(err * 1.5 <= previous);
      previous = err;
    }
  }
}

TEST_CASE("property: peeling covariance") {
  std::mt19937_64 rng(31);
  const auto slit = random_polyline(rng, 6);
  const auto u = drive_from_slit(slit, 1e-3).driving;
  const double d = 1.7;
  const auto scaled = drive_from_slit(slit.scaled(d), 1e-3 * d * d).driving;
  const auto shifted = drive_from_slit(slit.translated(-2.0), 1e-3).driving;
  const auto mirrored = drive_from_slit(slit.reflected(), 1e-3).driving;
  CHECK(scaled.horizon() == doctest::Approx(d * d * u.horizon()));
  for (int i = 0; i <= 200; ++i) {
    const double t = u.horizon() * i / 200;
    CHECK(scaled(d * d * t) == doctest::Approx(d * u(t)).epsilon(1e-9));
    CHECK(shifted(t) == doctest::Approx(u(t) - 2.0).epsilon(1e-9));
    CHECK(mirrored(t) == doctest::Approx(-u(t)).epsilon(1e-9));
  }
}

TEST_CASE("property: peeling converges as dcap shrinks") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 3; ++trial) {
    const auto slit = random_polyline(rng, 6);
    const auto fine = drive_from_slit(slit, 2.5e-4).driving;
    const double coarse_gap = sup_difference(drive_from_slit(slit, 4e-3).driving, fine);
    const double mid_gap = sup_difference(drive_from_slit(slit, 1e-3).driving, fine);
    CHECK(mid_gap < coarse_gap);
  }
}

TEST_CASE("the peeled driving retraces the slit") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 3; ++trial) {
    const auto slit = random_polyline(rng, 6);
    const double dcap = 1e-3;
    const auto peel = drive_from_slit(slit, dcap);
    // PiecewiseSqrt with one step per piece reproduces the chain exactly.
    std::vector<double> grid = peel.driving.times();
    TraceOptions options;
    options.grid = grid;
    const auto traced = trace_single(peel.driving, 0, options);
    CHECK(hausdorff(traced.curves[0].points, slit.vertices) <
          10.0 * std::sqrt(dcap) * slit.diameter());
    CHECK(hausdorff(traced.curves[0].points, slit.vertices) < 1e-8 * slit.diameter());
  }
}

TEST_CASE("peeling errors") {
  CHECK_THROWS_AS(drive_from_slit(segment({0.0, 0.0}, {0.0, 1.0}), 0.0), DomainError);
  CHECK_THROWS_AS(drive_from_slit(segment({0.0, 0.0}, {0.0, 1.0}), 10.0), ResolutionError);
  CHECK_THROWS_AS(drive_from_slit(SlitPolyline{{{0.0, 0.0}, {1.0, 1.0}, {2.0, -1.0}}}),
                  GeometryError);
  // Nearly tangent first piece: accepted with the vertical fallback.
  const auto flat = drive_from_slit(SlitPolyline{{{0.0, 0.0}, {1.0, 1e-300}, {1.0, 1.0}}});
  CHECK(flat.degenerate_start);
}
