#include "loewner/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "loewner/trace.hpp"

namespace loewner {

namespace {

struct SlitState {
  std::vector<Point> images;
  std::size_t next = 1;
  double base = 0.0;
  double own = 0.0;
  double finished = -1.0;
};

class Growth {
 public:
  Growth(const PreparedSlits& p, bool record) : p_(p), record_(record), state_(p.points.size()) {
    for (std::size_t k = 0; k < state_.size(); ++k) {
      state_[k].images = p.points[k];
      state_[k].base = p.points[k].front().real();
    }
    if (record_) {
      progress_.resize(state_.size());
      bases_.resize(state_.size());
      sample(0.0);
    }
  }

  bool exhausted(std::size_t k) const { return state_[k].next >= p_.points[k].size(); }
  bool all_exhausted() const {
    for (std::size_t k = 0; k < state_.size(); ++k) {
      if (!exhausted(k)) return false;
    }
    return true;
  }

  /// Peels up to `budget` hcap-time from slit k, starting at schedule time
  /// `clock`; returns the hcap-time used.
  double grow(std::size_t k, double budget, double clock) {
    auto& s = state_[k];
    const auto& own = p_.own[k];
    const double floor = 1e-14 * p_.horizon;
    double used = 0.0;
    while (!exhausted(k) && budget - used > floor) {
      const Point target = s.images[s.next];
      ElementaryMap m = piece(s, target);
      const double remaining = budget - used;
      if (m.duration() <= remaining) {
        s.own = own[s.next];
        ++s.next;
      } else {
        const double fraction = remaining / m.duration();
        m = ElementaryMap::through(s.base, s.base + (target - s.base) * std::sqrt(fraction));
        s.own += (own[s.next] - s.own) * fraction;
      }
      apply(k, m);
      used += m.duration();
    }
    if (exhausted(k) && s.finished < 0.0) s.finished = clock + used;
    return used;
  }

  void sample(double t) {
    times_.push_back(t);
    for (std::size_t k = 0; k < state_.size(); ++k) {
      bases_[k].push_back(state_[k].base);
      progress_[k].push_back(2.0 * state_[k].own);
    }
  }

  double own(std::size_t k) const { return state_[k].own; }
  double finished(std::size_t k) const { return state_[k].finished; }
  MapChain& chain() { return chain_; }
  std::vector<double>& times() { return times_; }
  std::vector<std::vector<double>>& bases() { return bases_; }
  std::vector<std::vector<double>>& progress() { return progress_; }

 private:
  ElementaryMap piece(const SlitState& s, Point target) const {
    try {
      return ElementaryMap::through(s.base, target);
    } catch (const GeometryError&) {
      if (s.next != 1 || s.own != 0.0) throw;
      const double r = std::abs(target - s.base);
      return ElementaryMap::through(s.base, {target.real(), 1e-12 * r});
    }
  }

  void apply(std::size_t k, const ElementaryMap& m) {
    chain_.push(m);
    for (std::size_t i = 0; i < state_.size(); ++i) {
      auto& s = state_[i];
      s.base = i == k ? m.tip_image() : m.boundary_forward(s.base);
      for (std::size_t j = s.next; j < s.images.size(); ++j) {
        s.images[j] = m.forward(s.images[j]);
        if (!(s.images[j].imag() > 0.0)) {
          std::ostringstream msg;
          msg << "a point of slit " << i + 1 << " left the upper half-plane during growth";
          throw GeometryError(msg.str());
        }
      }
    }
  }

  const PreparedSlits& p_;
  bool record_;
  std::vector<SlitState> state_;
  MapChain chain_;
  std::vector<double> times_;
  std::vector<std::vector<double>> bases_;
  std::vector<std::vector<double>> progress_;
};

void check_lambdas(const std::vector<double>& lambdas, std::size_t n) {
  if (lambdas.size() != n) throw DomainError("one weight per slit is required");
  double sum = 0.0;
  for (double l : lambdas) {
    if (!(l >= 0.0 && l <= 1.0)) throw DomainError("schedule weights must lie in [0, 1]");
    sum += l;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw DomainError("schedule weights must sum to 1");
}

// Schedule intervals of length `width` up to `horizon`; the last one may be
// cut short.
GrowthResult run_growth(const PreparedSlits& p, const std::vector<double>& lambdas, double width,
                        double horizon, bool palindromic, bool record, bool strict) {
  const std::size_t n = p.points.size();
  check_lambdas(lambdas, n);
  Growth g(p, record);
  GrowthResult out;
  const auto intervals = static_cast<std::size_t>(std::ceil(horizon / width - 1e-9));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const double slack = 2.0 * p.dcap * static_cast<double>(n) + 1e-9 * horizon;
  for (std::size_t i = 0; i < intervals; ++i) {
    double clock = width * static_cast<double>(i);
    const double length = std::min(width, horizon - clock);
    if (palindromic && i > 0) std::reverse(order.begin(), order.end());
    for (std::size_t k : order) {
      const double budget = lambdas[k] * length;
      if (budget <= 0.0) continue;
      g.grow(k, budget, clock);
      clock += budget;
    }
    if (strict && g.all_exhausted() && horizon - clock > slack) {
      std::ostringstream msg;
      msg << "the schedule demands hcap-time " << horizon << " but the slits are used up at t="
          << clock;
      throw ExhaustedError(msg.str());
    }
    if (!record && !strict && g.all_exhausted()) break;
    // Within an interval the drivings zigzag with the turn order; only the
    // interval ends are recorded.
    if (record) g.sample(i + 1 == intervals ? horizon : width * static_cast<double>(i + 1));
  }
  for (std::size_t k = 0; k < n; ++k) {
    out.fractions.push_back(g.own(k) / p.own_total[k]);
    out.consumed.push_back(2.0 * g.own(k));
    out.finish_times.push_back(g.finished(k) >= 0.0 ? g.finished(k)
                                                    : std::numeric_limits<double>::infinity());
  }
  out.chain = std::move(g.chain());
  if (record) {
    out.times = g.times();
    for (std::size_t k = 0; k < n; ++k) {
      out.drivings.emplace_back(out.times, g.bases()[k], Interp::Linear);
    }
    out.progress = std::move(g.progress());
  }
  return out;
}

double max_change(const std::vector<double>& a, const std::vector<double>& b) {
  double moved = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) moved = std::max(moved, std::abs(a[k] - b[k]));
  return moved;
}

std::string format_lambdas(const std::vector<double>& l) {
  std::ostringstream msg;
  msg.precision(10);
  msg << "(";
  for (std::size_t k = 0; k < l.size(); ++k) msg << (k ? ", " : "") << l[k];
  msg << ")";
  return msg.str();
}

}  // namespace

bool BangBangSchedule::active(double t) const {
  const double scaled = t / horizon * std::ldexp(1.0, level);
  const double phase = scaled - std::floor(scaled);
  return phase > 0.0 && phase < lambda;
}

PreparedSlits prepare_slits(const std::vector<SlitPolyline>& slits, const GrowthOptions& options) {
  if (slits.empty()) throw DomainError("at least one slit is required");
  PreparedSlits p;
  p.slits = slits;
  double diameter = 0.0;
  for (std::size_t k = 0; k < slits.size(); ++k) {
    validate_slit(slits[k]);
    diameter = std::max(diameter, slits[k].diameter());
    if (k > 0 && !(slits[k].base().real() > slits[k - 1].base().real())) {
      throw DomainError("slits must be ordered by strictly increasing base point");
    }
  }
  for (std::size_t i = 0; i < slits.size(); ++i) {
    for (std::size_t j = i + 1; j < slits.size(); ++j) {
      const double d = polyline_distance(slits[i].vertices, slits[j].vertices);
      if (d <= 1e-6 * diameter) {
        std::ostringstream msg;
        msg << "slits " << i + 1 << " and " << j + 1 << " are " << d
            << " apart, below the disjointness margin " << 1e-6 * diameter;
        throw DisjointnessError(msg.str());
      }
    }
  }
  p.dcap = options.dcap > 0.0 ? options.dcap : 1e-3 * diameter * diameter;
  for (const auto& slit : slits) {
    double dcap = p.dcap;
    for (;;) {
      try {
        auto peel = drive_from_slit(slit, dcap);
        p.points.push_back(std::move(peel.parameterized.points));
        p.own.push_back(std::move(peel.parameterized.times));
        p.own_total.push_back(peel.parameterized.total);
        break;
      } catch (const ResolutionError&) {
        dcap /= 16.0;
      }
    }
  }
  // Upper bound for now; only sets the growth's rounding floor.
  p.horizon = std::accumulate(p.own_total.begin(), p.own_total.end(), 0.0);
  Growth g(p, false);
  double total = 0.0;
  for (std::size_t k = 0; k < slits.size(); ++k) {
    total += g.grow(k, std::numeric_limits<double>::infinity(), total);
  }
  p.horizon = total;
  return p;
}

GrowthResult grow_alternating(const PreparedSlits& prepared, const std::vector<double>& lambdas,
                              int level, double horizon, const GrowthOptions& options) {
  if (level < 0 || level > 30) throw DomainError("schedule level must lie in [0, 30]");
  if (!(horizon > 0.0)) throw DomainError("schedule horizon must be positive");
  return run_growth(prepared, lambdas, std::ldexp(horizon, -level), horizon, options.palindromic,
                    true, true);
}

GrowthResult grow_alternating(const std::vector<SlitPolyline>& slits,
                              const BangBangSchedule& schedule, const GrowthOptions& options) {
  if (slits.size() != 2) throw DomainError("a bang-bang schedule drives exactly two slits");
  const auto prepared = prepare_slits(slits, options);
  const double horizon = schedule.horizon > 0.0 ? schedule.horizon : prepared.horizon;
  return grow_alternating(prepared, {schedule.lambda, 1.0 - schedule.lambda}, schedule.level,
                          horizon, options);
}

CoefficientSolution find_constant_coefficients(const std::vector<SlitPolyline>& slits, double tol,
                                               const SolverOptions& options) {
  const std::size_t n = slits.size();
  if (n < 2) throw DomainError("constant coefficients need at least two slits");
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  const auto p = prepare_slits(slits, options.growth);
  const double capacity = std::accumulate(p.own_total.begin(), p.own_total.end(), 0.0);
  std::vector<double> lambdas;
  for (double c : p.own_total) lambdas.push_back(c / capacity);

  CoefficientSolution out;
  auto& stats = out.stats;
  int level = options.first_level;

  // lambda_k = x, the others keep their proportions.
  auto with = [&](const std::vector<double>& l, std::size_t k, double x) {
    std::vector<double> r(n);
    const double rest = 1.0 - l[k];
    for (std::size_t j = 0; j < n; ++j) {
      r[j] = j == k ? x : (rest > 0.0 ? l[j] * (1.0 - x) / rest : (1.0 - x) / (n - 1));
    }
    return r;
  };
  // The schedule keeps its interval width T / 2^level but runs on to 4T, so
  // every slit with a sensible weight runs out and its finish time is exact.
  const double never = 4.0 * p.horizon;
  auto finish_times = [&](const std::vector<double>& l) {
    ++stats.evaluations;
    auto t = run_growth(p, l, std::ldexp(p.horizon, -level), never, options.growth.palindromic,
                        false, false)
                 .finish_times;
    for (double& x : t) x = std::min(x, never);
    return t;
  };
  // Positive when slit k runs out before the others.
  auto objective = [&](const std::vector<double>& l, std::size_t k) {
    const auto t = finish_times(l);
    double others = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != k) others += t[j];
    }
    return others / static_cast<double>(n - 1) - t[k];
  };
  auto solve_one = [&](std::vector<double>& l, std::size_t k, double width) {
    // At lambda_k = 0 slit k never runs out, at 1 the others never do.
    double lo = std::max(0.0, l[k] - width);
    double hi = std::min(1.0, l[k] + width);
    double f_lo = lo == 0.0 ? -never : objective(with(l, k, lo), k);
    while (f_lo > 0.0) {
      lo = std::max(0.0, lo - 4.0 * width);
      f_lo = lo == 0.0 ? -never : objective(with(l, k, lo), k);
    }
    double f_hi = hi == 1.0 ? never : objective(with(l, k, hi), k);
    while (f_hi < 0.0) {
      hi = std::min(1.0, hi + 4.0 * width);
      f_hi = hi == 1.0 ? never : objective(with(l, k, hi), k);
    }
    // Illinois regula falsi on the bracket.
    int side = 0;
    double x = 0.5 * (lo + hi);
    while (hi - lo > 0.05 * tol) {
      x = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
      if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
      const double f = objective(with(l, k, x), k);
      if (f == 0.0) break;
      if (f < 0.0) {
        lo = x;
        f_lo = f;
        if (side == -1) f_hi *= 0.5;
        side = -1;
      } else {
        hi = x;
        f_hi = f;
        if (side == 1) f_lo *= 0.5;
        side = 1;
      }
    }
    l = with(l, k, x);
  };

  std::vector<double> previous;
  bool converged = false;
  for (; level <= options.max_level; ++level) {
    const double width =
        previous.empty() ? 0.5 : std::max(4.0 * tol, 2.0 * max_change(lambdas, previous));
    for (int cycle = 0; cycle < options.max_cycles; ++cycle) {
      ++stats.cycles;
      const auto before = lambdas;
      for (std::size_t k = 0; k < (n == 2 ? 1 : n); ++k) solve_one(lambdas, k, width);
      if (n == 2 || max_change(lambdas, before) < 0.1 * tol) break;
      if (cycle + 1 == options.max_cycles) {
        throw ConvergenceError("cyclic coefficient solve did not settle at level " +
                               std::to_string(level) + "; last lambdas " +
                               format_lambdas(lambdas));
      }
    }
    stats.levels.push_back(level);
    stats.history.push_back(lambdas);
    if (level >= options.min_level && !previous.empty() &&
        max_change(lambdas, previous) < tol) {
      converged = true;
      break;
    }
    previous = lambdas;
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "lambda did not settle to " << tol << " by schedule level " << options.max_level
        << "; history:";
    for (std::size_t i = 0; i < stats.history.size(); ++i) {
      msg << " level " << stats.levels[i] << " " << format_lambdas(stats.history[i]);
    }
    throw ConvergenceError(msg.str());
  }

  // The slits run out together at hcap(union) / 2 as this discretization
  // sees it, which differs from the sequential estimate by O(dcap).
  const auto finish = finish_times(lambdas);
  const double horizon = std::accumulate(finish.begin(), finish.end(), 0.0) / static_cast<double>(n);
  auto g = run_growth(p, lambdas, std::ldexp(p.horizon, -level), horizon,
                      options.growth.palindromic, true, false);
  out.lambdas = lambdas;
  out.drivings = std::move(g.drivings);
  out.horizon = horizon;
  for (std::size_t k = 0; k < n; ++k) {
    out.hcaps.push_back(2.0 * p.own_total[k]);
    out.residuals.push_back(std::abs(g.consumed[k] - out.hcaps[k]));
  }
  out.times = std::move(g.times);
  out.progress = std::move(g.progress);
  out.level = level;
  return out;
}

VerificationReport verify_solution(const std::vector<SlitPolyline>& slits,
                                   const CoefficientSolution& solution, int steps) {
  const std::size_t n = slits.size();
  if (solution.lambdas.size() != n) throw DomainError("solution does not match the slits");
  VerificationReport report;
  const auto trace = trace_multi(solution.system(), steps);
  for (std::size_t k = 0; k < n; ++k) {
    report.hausdorff.push_back(hausdorff(trace.curves[k].points, slits[k].vertices));
    report.diameters.push_back(slits[k].diameter());
  }
  report.rates.resize(n);
  const auto& t = solution.times;
  for (std::size_t i = 1; i < t.size(); ++i) {
    report.rate_times.push_back(0.5 * (t[i] + t[i - 1]));
    for (std::size_t k = 0; k < n; ++k) {
      report.rates[k].push_back((solution.progress[k][i] - solution.progress[k][i - 1]) /
                                (t[i] - t[i - 1]));
    }
  }
  const double two_t = 2.0 * solution.horizon;
  const double total = std::accumulate(solution.hcaps.begin(), solution.hcaps.end(), 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    report.initial_rate.push_back(report.rates[k].empty() ? 0.0 : report.rates[k].front());
    const double weighted = 2.0 * solution.lambdas[k] * solution.horizon;
    const double others = total - solution.hcaps[k];
    report.bounds_hold.push_back(two_t - others < weighted && weighted < solution.hcaps[k]);
  }
  return report;
}

}  // namespace loewner
