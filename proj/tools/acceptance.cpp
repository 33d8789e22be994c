// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "loewner/capacity.hpp"
#include "loewner/coefficients.hpp"
#include "loewner/constructions.hpp"
#include "loewner/diagnostics.hpp"
#include "loewner/slit.hpp"
#include "loewner/trace.hpp"
#include "loewner/welding.hpp"

using namespace loewner;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Driving coefficient of the straight slit at angle phi, and its tip at t = 1.
double straight_coefficient(double phi) { return 2.0 * (kPi - 2.0 * phi) / std::sqrt(phi * (kPi - phi)); }
Point straight_tip(double phi) {
  return 2.0 * std::pow(kPi / phi - 1.0, 0.5 - phi / kPi) * std::polar(1.0, phi);
}

SlitPolyline random_polyline(std::mt19937_64& rng, int segments) {
  std::uniform_real_distribution<double> base(-1.0, 1.0);
  std::uniform_real_distribution<double> angle(0.15 * kPi, 0.85 * kPi);
  std::uniform_real_distribution<double> length(0.05, 0.4);
  SlitPolyline slit;
  slit.vertices.push_back({base(rng), 0.0});
  for (int i = 0; i < segments; ++i) slit.vertices.push_back(slit.vertices.back() + std::polar(length(rng), angle(rng)));
  return slit;
}

Outcome straight_slits() {
  Outcome o;
  double worst = 0.0, slowest = 0.0;
  for (double phi : {kPi / 6.0, kPi / 3.0, kPi / 2.0, 2.0 * kPi / 3.0}) {
    const auto start = std::chrono::steady_clock::now();
    const auto tr = trace_single(SampledDriving::sqrt_driving(straight_coefficient(phi), 1.0), 4000);
    slowest = std::max(slowest, seconds_since(start));
    const Point tip = straight_tip(phi);
    const double rel = std::abs(tr.curves[0].points.back() - tip) / std::abs(tip);
    worst = std::max(worst, rel);
    o.require(rel < 1e-2, fmt("phi=%.4f relative error %.3g", phi, rel));
  }
  o.require(slowest < 1.0, fmt("slowest case %.2f s", slowest));
  if (o.pass) o.detail = fmt("worst relative tip error %.2e, slowest case %.3f s", worst, slowest);
  return o;
}

Outcome kufarev() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const int n = 4000;
  TraceOptions options;
  // Steps graded geometrically towards the hitting time.
  for (int i = 0; i < n; ++i) options.grid.push_back(i == 0 ? 0.0 : 1.0 - std::pow(1e-9, double(i) / (n - 1)));
  options.grid.push_back(1.0);
  const auto tr = trace_single(hitting_driving(5.0), n, options);
  const auto& pts = tr.curves[0].points;
  const auto angle = terminal_angle(pts);
  const double elapsed = seconds_since(start);
  const double expected = kPi / 4.0;
  const double rel = std::abs(angle.angle / expected - 1.0);
  o.require(pts.back().imag() < 1e-3, fmt("trace ends at height %.3g", pts.back().imag()));
  o.require(rel < 0.05, fmt("terminal angle %.4f vs %.4f", angle.angle, expected));
  o.require(elapsed < 2.0, fmt("%.2f s", elapsed));
  if (o.pass) o.detail = fmt("terminal angle %.4f (pi/4 = %.4f), %.3f s", angle.angle, expected, elapsed);
  return o;
}

Outcome round_trip() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2718);
  std::uniform_int_distribution<int> terms(1, 3);
  std::bernoulli_distribution use_sqrt(0.5);
  std::uniform_real_distribution<double> amp(-1.5, 1.5), freq(0.5, 6.0), phase(0.0, 2.0 * kPi), shift(0.05, 0.5);
  double worst_coarse = 0.0, worst_gain = INFINITY;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::function<double(double)>> parts;
    for (int k = terms(rng); k > 0; --k) {
      const double a = amp(rng);
      if (use_sqrt(rng)) {
        const double tau = shift(rng);
        parts.push_back([=](double t) { return a * (std::sqrt(t + tau) - std::sqrt(tau)); });
      } else {
        const double w = freq(rng), p = phase(rng);
        parts.push_back([=](double t) { return a * (std::sin(w * t + p) - std::sin(p)); });
      }
    }
    auto raw = [&](double t) {
      double s = 0.0;
      for (const auto& f : parts) s += f(t);
      return s;
    };
    double sup = 0.0;
    for (int i = 0; i <= 4000; ++i) sup = std::max(sup, std::abs(raw(i / 4000.0)));
    const double scale = sup > 2.0 ? 2.0 / sup : 1.0;
    auto f = [&](double t) { return scale * raw(t); };

    double errors[2];
    for (int level = 0; level < 2; ++level) {
      const int steps = 250 << level;
      const auto u = SampledDriving::sample(f, 1.0, steps);
      const SlitPolyline slit{trace_single(u, steps).curves[0].points};
      const auto peeled = drive_from_slit(slit, 1.0 / steps).driving;
      double err = 0.0;
      const double horizon = std::min(1.0, peeled.horizon());
      for (int i = 0; i <= 4000; ++i) err = std::max(err, std::abs(peeled(horizon * i / 4000) - f(horizon * i / 4000)));
      errors[level] = err;
    }
    worst_coarse = std::max(worst_coarse, errors[0]);
    worst_gain = std::min(worst_gain, errors[0] / errors[1]);
    o.require(errors[0] <= 5e-2, fmt("trial %.0f sup error %.3g", trial, errors[0]));
    o.require(errors[0] >= 1.5 * errors[1], fmt("trial %.0f refinement gain %.3g", trial, errors[0] / errors[1]));
  }
  const double elapsed = seconds_since(start);
  o.require(elapsed < 30.0, fmt("%.1f s", elapsed));
  if (o.pass) o.detail = fmt("worst sup error %.2e, smallest refinement gain %.2f, %.1f s", worst_coarse, worst_gain, elapsed);
  return o;
}

Outcome sandwich() {
  Outcome o;
  std::mt19937_64 rng(1066);
  int violations = 0;
  double low = INFINITY, high = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    SlitPolyline slit;
    do {
      slit = random_polyline(rng, 2 + trial % 7);
      try {
        validate_slit(slit);
        break;
      } catch (const GeometryError&) {
      }
    } while (true);
    const double cap = hcap_of_slit(slit, 1e-3);
    const double area = hsiz({slit}, 1e-3);
    low = std::min(low, cap / area);
    high = std::max(high, cap / area);
    if (!(area / 66.0 < cap && cap <= 7.0 / (2.0 * kPi) * area)) ++violations;
  }
  o.require(violations == 0, fmt("%.0f violations", violations));
  o.detail += (o.detail.empty() ? "" : "; ") + fmt("hcap/hsiz in [%.4f, %.4f]", low, high) +
              fmt(", allowed (%.4f, %.4f]", 1.0 / 66.0, 7.0 / (2.0 * kPi));
  return o;
}

Outcome covariance() {
  Outcome o;
  std::mt19937_64 rng(99);
  std::vector<SlitPolyline> slits;
  while (slits.size() < 3) {
    const auto s = random_polyline(rng, 4);
    try {
      validate_slit(s);
      slits.push_back(s);
    } catch (const GeometryError&) {
    }
  }
  MonteCarloOptions mc;
  mc.seed = 5;
  double worst_scale = 0.0, worst_shift = 0.0;
  for (const auto& slit : slits) {
    const double chain = hcap_of_slit(slit, 1e-3);
    const double moment = hcap_moment(drive_from_slit(slit, 1e-3).chain);
    const auto carlo = hcap_monte_carlo({slit}, mc);
    for (double d : {0.5, 2.0, 3.0}) {
      const SlitPolyline scaled = slit.scaled(d);
      const double d2 = d * d;
      const double rc = std::abs(hcap_of_slit(scaled, 1e-3) / (d2 * chain) - 1.0);
      const double rm = std::abs(hcap_moment(drive_from_slit(scaled, 1e-3).chain) / (d2 * moment) - 1.0);
      const auto sc = hcap_monte_carlo({scaled}, mc);
      const double gap = std::abs(sc.estimate - d2 * carlo.estimate);
      const double allowed = 0.01 * d2 * carlo.estimate + 3.0 * std::hypot(sc.standard_error, d2 * carlo.standard_error);
      worst_scale = std::max({worst_scale, rc, rm, gap / (d2 * carlo.estimate)});
      o.require(rc < 0.01, fmt("chain scaling d=%.1f off by %.3g", d, rc));
      o.require(rm < 0.01, fmt("moment scaling d=%.1f off by %.3g", d, rm));
      o.require(gap <= allowed, fmt("mc scaling d=%.1f gap %.3g > %.3g", d, gap, allowed));
    }
    for (double x : {-2.5, 0.75, 10.0}) {
      const SlitPolyline moved = slit.translated(x);
      const double rc = std::abs(hcap_of_slit(moved, 1e-3) / chain - 1.0);
      const double rm = std::abs(hcap_moment(drive_from_slit(moved, 1e-3).chain) / moment - 1.0);
      const double rmc = std::abs(hcap_monte_carlo({moved}, mc).estimate / carlo.estimate - 1.0);
      worst_shift = std::max({worst_shift, rc, rm, rmc});
      o.require(rc < 1e-6 && rm < 1e-6 && rmc < 1e-6,
                fmt("translation by %.2f: chain %.2g, moment %.2g", x, rc, rm) + fmt(", mc %.2g", rmc));
    }
  }
  if (o.pass) o.detail = fmt("worst relative scaling defect %.2e, worst translation defect %.2e", worst_scale, worst_shift);
  return o;
}

SlitPolyline bent() { return SlitPolyline{{{-1.0, 0.0}, {-1.2, 0.5}, {-1.05, 1.0}}}; }

struct PairRun {
  CoefficientSolution solution;
  VerificationReport report;
  double solve_seconds = 0.0;
};

const PairRun& symmetric_pair() {
  static const PairRun run = [] {
    PairRun r;
    const auto start = std::chrono::steady_clock::now();
    r.solution = find_constant_coefficients({bent(), bent().reflected()}, 1e-4);
    r.solve_seconds = seconds_since(start);
    r.report = verify_solution({bent(), bent().reflected()}, r.solution, 4000);
    return r;
  }();
  return run;
}

Outcome coefficients() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const auto& run = symmetric_pair();
  const auto& s = run.solution;
  const double l1 = s.lambdas[0];
  o.require(std::abs(l1 - 0.5) <= 1e-3, fmt("lambda_1 = %.6f", l1));
  for (std::size_t k = 0; k < 2; ++k) {
    o.require(run.report.hausdorff[k] < 1e-2 * run.report.diameters[k],
              fmt("slit %.0f Hausdorff %.3g vs diameter %.3g", k, run.report.hausdorff[k], run.report.diameters[k]));
  }
  const double weighted = 2.0 * l1 * s.horizon;
  o.require(2.0 * s.horizon - s.hcaps[1] < weighted && weighted < s.hcaps[0],
            fmt("bounds %.6f < %.6f < %.6f", 2.0 * s.horizon - s.hcaps[1], weighted, s.hcaps[0]));
  const auto shrunk = find_constant_coefficients({bent().arc_prefix(0.5), bent().reflected()}, 1e-4);
  o.require(shrunk.lambdas[0] < l1, fmt("shrunk lambda_1 = %.6f vs %.6f", shrunk.lambdas[0], l1));
  const double elapsed = seconds_since(start);
  o.require(elapsed < 60.0, fmt("%.1f s", elapsed));
  if (o.pass) {
    o.detail = fmt("lambda_1 = %.6f, Hausdorff/diameter = %.2e, shrunk lambda_1 = %.4f", l1,
                   run.report.hausdorff[0] / run.report.diameters[0], shrunk.lambdas[0]) +
               fmt(", %.1f s", elapsed);
  }
  return o;
}

Outcome welding() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  auto one = [](SampledDriving u) { return MultiSlitSystem(std::vector<double>{1.0}, {std::move(u)}); };
  const auto regular = is_welded(one(hitting_driving(3.0)));
  o.require(regular.welded, "3 sqrt(1 - t) not welded");
  const auto hitting = is_welded(one(hitting_driving(5.0)));
  o.require(!hitting.welded, "5 sqrt(1 - t) welded");
  WeldingOptions options;
  options.irregular_check = true;
  const auto zigzag_driving = self_similar_zigzag(5.0, 16);
  const auto zigzag = is_welded(one(zigzag_driving), 64, 64, options);
  o.require(zigzag.welded, "zigzag not welded");
  o.require(!zigzag.irregular.empty() && zigzag.irregular[0].holds, "irregular-case pattern fails for the zigzag");
  HolderOptions holder;
  holder.times = {1.0};
  const double left = local_holder_norms(zigzag_driving, 0.5, holder).left[0];
  o.require(std::abs(left - 5.0) <= 1e-3, fmt("zigzag left proxy %.6f", left));
  const double elapsed = seconds_since(start);
  o.require(elapsed < 20.0, fmt("%.1f s", elapsed));
  if (o.pass) o.detail = fmt("zigzag left proxy %.9f, 5 sqrt(1 - t) margin %.2e, %.1f s", left, hitting.margin, elapsed);
  return o;
}

Outcome dynamic_coefficient() {
  Outcome o;
  const auto& run = symmetric_pair();
  const double l1 = run.solution.lambdas[0];
  const double initial = run.report.initial_rate[0] / 2.0;
  o.require(std::abs(initial - l1) <= 0.05, fmt("xdot(0)/2 = %.4f vs lambda %.4f", initial, l1));
  const auto& rates = run.report.rates[0];
  int below = 0;
  double lowest = INFINITY;
  for (std::size_t i = 1; i + 1 < rates.size(); ++i) {
    lowest = std::min(lowest, rates[i]);
    if (!(rates[i] > 2.0 * l1)) ++below;
  }
  o.require(below == 0, fmt("%.0f interior rates at or below 2 lambda", below));
  if (o.pass) o.detail = fmt("xdot(0)/2 = %.4f vs lambda %.4f, smallest interior xdot %.4f", initial, l1, lowest);
  return o;
}

MapChain random_chain(std::mt19937_64& rng, int length, bool single_slit) {
  std::uniform_real_distribution<double> where(-2.0, 2.0);
  std::normal_distribution<double> normal(0.0, 2.0);
  std::bernoulli_distribution vertical(0.25);
  MapChain chain;
  const double dt = 1.0 / length;
  double base = 0.0;
  for (int i = 0; i < length; ++i) {
    if (!single_slit) base = where(rng);
    const auto m = vertical(rng) ? ElementaryMap::vertical(base, dt) : ElementaryMap::tilted(base, normal(rng), dt);
    chain.push(m);
    if (single_slit) base = m.tip_image();
  }
  return chain;
}

Outcome invariants() {
  Outcome o;
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> x(-4.0, 4.0), logy(std::log(1e-3), std::log(3.0));
  int checks = 0;

  // Height bound on traces of rough random drivings.
  std::normal_distribution<double> step(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> t{0.0}, u{0.0};
    for (int i = 1; i <= 200; ++i) {
      t.push_back(i / 200.0);
      u.push_back(u.back() + 0.3 * step(rng));
    }
    const auto tr = trace_single(SampledDriving(t, u, Interp::Linear), 1000);
    const auto& c = tr.curves[0];
    for (std::size_t i = 0; i < c.points.size(); ++i) {
      ++checks;
      o.require(c.points[i].imag() <= 2.0 * std::sqrt(c.times[i]) * (1.0 + 1e-12), "trace above 2 sqrt(t)");
    }
  }

  for (int length : {1, 10, 100, 1000}) {
    for (int trial = 0; trial < 4; ++trial) {
      const bool single = trial % 2 == 1;
      const auto chain = random_chain(rng, length, single);
      for (int k = 0; k < 200; ++k) {
        const Point w(x(rng), std::exp(logy(rng)));
        const Point z = chain.inverse(w);
        const Point back = chain.forward(z);
        checks += 3;
        o.require(z.imag() >= w.imag(), "inverse lowered Im");
        o.require(back.imag() <= z.imag(), "forward raised Im");
        o.require(std::abs(back - w) <= 1e-10 * (1.0 + std::abs(w)), "forward(inverse(w)) != w");
      }
      if (!single) continue;
      // One slit rooted at 0: g moves points away from the base and is
      // 1-Lipschitz on the real axis outside the hull's shadow.
      double px = -10.0, pg = chain.boundary_image(px);
      for (double xr = -9.9; xr < -1e-3; xr += 0.1) {
        const double g = chain.boundary_image(xr);
        checks += 2;
        o.require(g <= xr + 1e-12 && g >= pg, "left boundary image not below x or not monotone");
        o.require(g - pg <= xr - px + 1e-12, "boundary map expands to the left");
        px = xr;
        pg = g;
      }
      for (double xr = 1e-3; xr < 10.0; xr += 0.1) {
        ++checks;
        o.require(chain.boundary_image(xr) >= xr - 1e-12, "right boundary image below x");
      }
    }
  }
  if (o.pass) o.detail = fmt("%.0f checks", checks);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"straight-slit forward benchmark", straight_slits},
      {"Kufarev hitting benchmark", kufarev},
      {"driving round trip", round_trip},
      {"capacity sandwich", sandwich},
      {"capacity covariance", covariance},
      {"constant coefficients", coefficients},
      {"welding thresholds", welding},
      {"dynamic coefficient", dynamic_coefficient},
      {"invariant suites", invariants},
  };
  int failed = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::printf("criterion %d %-34s %s  %s\n", index, c.name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
