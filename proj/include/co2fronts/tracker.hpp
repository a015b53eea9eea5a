#ifndef CO2FRONTS_TRACKER_HPP_
#define CO2FRONTS_TRACKER_HPP_

/// @file tracker.hpp
/// @brief Wave-front tracking: piecewise-constant data, rarefactions
/// replaced by expansion shocks of size <= h, and an event loop resolving
/// binary collisions between adjacent fronts.
///
/// Every collision joins the outer states of the two incoming fronts, so
/// the front count drops by at least one per event, no new state values
/// appear, and the loop terminates after at most (initial fronts) events.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "co2fronts/flux.hpp"
#include "co2fronts/interactions.hpp"
#include "co2fronts/riemann.hpp"

namespace co2fronts {

/// Breakpoints x_1 < ... < x_n and n+1 values; values.front() extends to
/// -infinity and values.back() to +infinity. Right-continuous.
struct PiecewiseConstantState {
  std::vector<double> breakpoints;
  std::vector<double> values{0.0};

  double operator()(double x) const {
    const auto it =
        std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
    return values[static_cast<std::size_t>(it - breakpoints.begin())];
  }

  double total_variation() const {
    double tv = 0.0;
    for (std::size_t i = 1; i < values.size(); ++i) {
      tv += std::abs(values[i] - values[i - 1]);
    }
    return tv;
  }

  double min_value() const {
    return *std::min_element(values.begin(), values.end());
  }
  double max_value() const {
    return *std::max_element(values.begin(), values.end());
  }

  /// Throws std::invalid_argument on a malformed state.
  void validate() const {
    if (values.size() != breakpoints.size() + 1) {
      throw std::invalid_argument("state needs one more value than breakpoints");
    }
    for (std::size_t i = 1; i < breakpoints.size(); ++i) {
      if (!(breakpoints[i] > breakpoints[i - 1])) {
        throw std::invalid_argument("breakpoints must be strictly increasing");
      }
    }
    for (double v : values) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw std::invalid_argument("state values must lie in [0,1]");
      }
    }
  }

  /// Drop breakpoints across which the value does not change.
  void merge_equal_runs() {
    std::vector<double> bp;
    std::vector<double> vals{values.front()};
    for (std::size_t i = 0; i < breakpoints.size(); ++i) {
      if (values[i + 1] != vals.back()) {
        bp.push_back(breakpoints[i]);
        vals.push_back(values[i + 1]);
      }
    }
    breakpoints = std::move(bp);
    values = std::move(vals);
  }
};

/// Exact L1 distance between two piecewise-constant states with equal tails.
inline double l1_distance(const PiecewiseConstantState& a,
                          const PiecewiseConstantState& b) {
  if (a.values.front() != b.values.front() ||
      a.values.back() != b.values.back()) {
    return std::numeric_limits<double>::infinity();
  }
  std::vector<double> xs = a.breakpoints;
  xs.insert(xs.end(), b.breakpoints.begin(), b.breakpoints.end());
  std::sort(xs.begin(), xs.end());
  double total = 0.0;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double w = xs[i] - xs[i - 1];
    if (w <= 0.0) continue;
    const double mid = 0.5 * (xs[i] + xs[i - 1]);
    total += std::abs(a(mid) - b(mid)) * w;
  }
  return total;
}

/// Use a piecewise-constant description as-is, after validation and
/// merging of equal neighbours.
inline PiecewiseConstantState approximate_initial(PiecewiseConstantState spec) {
  spec.validate();
  spec.merge_equal_runs();
  return spec;
}

/// Point-sample @p profile at pitch @p delta over [lo, hi]. Cell values are
/// midpoint samples; the tails take profile(lo) and profile(hi). Sampling
/// keeps values within the range of the profile and cannot raise its total
/// variation.
inline PiecewiseConstantState approximate_initial(
    const std::function<double(double)>& profile, double delta, double lo,
    double hi) {
  if (!(hi > lo)) throw std::invalid_argument("empty sampling window");
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  const auto n = static_cast<std::size_t>(
      std::max(1.0, std::ceil((hi - lo) / delta - 1e-9)));
  auto sample = [&](double x) {
    const double v = profile(x);
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument("profile value outside [0,1] at x = " +
                                  std::to_string(x));
    }
    return v;
  };
  auto edge = [&](std::size_t k) {
    return k == n ? hi
                  : lo + (hi - lo) * static_cast<double>(k) /
                             static_cast<double>(n);
  };
  PiecewiseConstantState state;
  state.values = {sample(lo)};
  for (std::size_t k = 0; k < n; ++k) {
    state.breakpoints.push_back(edge(k));
    state.values.push_back(sample(0.5 * (edge(k) + edge(k + 1))));
  }
  state.breakpoints.push_back(hi);
  state.values.push_back(sample(hi));
  state.merge_equal_runs();
  return state;
}

/// Riemann solutions at every jump: up-jumps become one admissible shock,
/// down-jumps ceil(jump/h) expansion shocks. Fronts of one fan share a
/// position and are ordered by increasing speed.
template <ConcaveFlux Flux>
std::vector<Front> initialize_fronts(const Flux& flux,
                                     const PiecewiseConstantState& state,
                                     double h) {
  if (!(h > 0.0)) throw std::invalid_argument("initialize_fronts: h > 0");
  std::vector<Front> fronts;
  for (std::size_t i = 0; i < state.breakpoints.size(); ++i) {
    const double ul = state.values[i];
    const double ur = state.values[i + 1];
    const double x = state.breakpoints[i];
    if (ul == ur) continue;
    if (ul < ur) {
      fronts.push_back(make_front(flux, ul, ur, x));
    } else {
      auto fan = discretize_rarefaction(flux, make_fan(flux, ul, ur, x), h);
      fronts.insert(fronts.end(), fan.begin(), fan.end());
    }
  }
  return fronts;
}

/// One straight piece of a front's path; a front never changes speed, so
/// each front id owns exactly one segment.
struct FrontSegment {
  int id = 0;
  double t_start = 0.0;
  double t_end = 0.0;
  double x_start = 0.0;
  double x_end = 0.0;
  double u_left = 0.0;
  double u_right = 0.0;
  FrontKind kind = FrontKind::AdmissibleShock;
  Regime regime = Regime::Stationary;
  double sigma = 1.0;
  double speed = 0.0;
  bool survives = false;  ///< still alive at the horizon

  double position(double t) const { return x_start + speed * (t - t_start); }
  bool alive_at(double t) const {
    return t_start <= t && (t < t_end || (survives && t <= t_end));
  }
};

enum class EventType { Collision, Annihilation };

inline const char* to_string(EventType e) {
  return e == EventType::Collision ? "collision" : "annihilation";
}

struct EventRecord {
  double t = 0.0;
  double x = 0.0;
  EventType type = EventType::Collision;
  std::vector<int> in_ids;
  std::vector<int> out_ids;
  double tv_before = 0.0;
  double tv_after = 0.0;
};

struct DiagnosticSample {
  double t = 0.0;
  double tv = 0.0;
  int front_count = 0;
  double plume_area = 0.0;
  double support_width = 0.0;
};

/// Complete record of a tracking run up to its horizon.
struct Trace {
  double horizon = 0.0;
  double trapping = 0.0;
  double far_left = 0.0;
  double far_right = 0.0;
  std::vector<FrontSegment> segments;
  std::vector<EventRecord> events;
  std::vector<DiagnosticSample> series;
};

namespace detail {

struct LiveFront {
  int id;
  double x0;
  double t0;
  Front front;

  double position(double t) const { return x0 + front.speed * (t - t0); }
};

inline double event_tolerance(double t) { return 1e-12 * (1.0 + std::abs(t)); }

struct Candidate {
  std::size_t left;
  Collision at;
  double closing;
};

// Earlier first; ties go to the left-most, then to the larger closing speed.
inline bool earlier(const Candidate& a, const Candidate& b) {
  const double tol = event_tolerance(std::max(a.at.t, b.at.t));
  if (std::abs(a.at.t - b.at.t) > tol) return a.at.t < b.at.t;
  if (std::abs(a.at.x - b.at.x) > tol) return a.at.x < b.at.x;
  return a.closing > b.closing;
}

inline DiagnosticSample sample_live(std::span<const LiveFront> live, double t) {
  DiagnosticSample s;
  s.t = t;
  s.front_count = static_cast<int>(live.size());
  for (const auto& f : live) s.tv += f.front.jump();
  if (!live.empty()) {
    double prev_x = live.front().position(t);
    s.support_width = live.back().position(t) - prev_x;
    for (std::size_t i = 1; i < live.size(); ++i) {
      const double x = live[i].position(t);
      s.plume_area += live[i].front.u_left * std::max(0.0, x - prev_x);
      prev_x = std::max(prev_x, x);
    }
  }
  return s;
}

}  // namespace detail

/// Evolve ordered, state-consistent fronts to @p horizon. @p background is
/// the state used when there are no fronts at all.
template <ConcaveFlux Flux>
Trace evolve(const Flux& flux, std::span<const Front> fronts, double horizon,
             double background = 0.0) {
  if (!(horizon > 0.0)) throw std::invalid_argument("evolve: horizon > 0");
  for (std::size_t i = 1; i < fronts.size(); ++i) {
    if (std::abs(fronts[i - 1].u_right - fronts[i].u_left) > kStateMatch) {
      throw std::invalid_argument("evolve: adjacent fronts disagree on state");
    }
    if (fronts[i].x < fronts[i - 1].x) {
      throw std::invalid_argument("evolve: fronts not ordered by position");
    }
  }
  Trace trace;
  trace.horizon = horizon;
  trace.trapping = flux.trapping();
  trace.far_left = fronts.empty() ? background : fronts.front().u_left;
  trace.far_right = fronts.empty() ? background : fronts.back().u_right;

  std::vector<detail::LiveFront> live;
  int next_id = 0;
  for (const auto& f : fronts) live.push_back({next_id++, f.x, 0.0, f});

  auto close_segment = [&](const detail::LiveFront& lf, double t, double x,
                           bool survives) {
    FrontSegment seg;
    seg.id = lf.id;
    seg.t_start = lf.t0;
    seg.t_end = t;
    seg.x_start = lf.x0;
    seg.x_end = x;
    seg.u_left = lf.front.u_left;
    seg.u_right = lf.front.u_right;
    seg.kind = lf.front.kind;
    seg.regime = lf.front.regime;
    seg.sigma = sigma_of(lf.front.regime, flux.trapping());
    seg.speed = lf.front.speed;
    seg.survives = survives;
    trace.segments.push_back(seg);
  };

  double now = 0.0;
  trace.series.push_back(detail::sample_live(live, now));
  for (;;) {
    std::optional<detail::Candidate> best;
    for (std::size_t k = 0; k + 1 < live.size(); ++k) {
      const auto& a = live[k];
      const auto& b = live[k + 1];
      auto hit = collision_time(a.position(now), a.front.speed,
                                b.position(now), b.front.speed, now);
      if (!hit) continue;
      detail::Candidate c{k, *hit, a.front.speed - b.front.speed};
      if (!best || detail::earlier(c, *best)) best = c;
    }
    if (!best || best->at.t > horizon) break;

    const std::size_t k = best->left;
    const double t = best->at.t;
    const double x = best->at.x;
    const auto left = live[k];
    const auto right = live[k + 1];
    auto outcome = resolve_collision(flux, left.front, right.front, x);

    EventRecord ev;
    ev.t = t;
    ev.x = x;
    ev.in_ids = {left.id, right.id};
    ev.tv_before = outcome.tv_before;
    ev.tv_after = outcome.tv_after;
    close_segment(left, t, x, false);
    close_segment(right, t, x, false);

    live.erase(live.begin() + static_cast<std::ptrdiff_t>(k),
               live.begin() + static_cast<std::ptrdiff_t>(k + 2));
    if (outcome.outgoing.empty()) {
      ev.type = EventType::Annihilation;
    } else {
      ev.type = EventType::Collision;
      const int id = next_id++;
      ev.out_ids = {id};
      live.insert(live.begin() + static_cast<std::ptrdiff_t>(k),
                  detail::LiveFront{id, x, t, outcome.outgoing.front()});
    }
    trace.events.push_back(std::move(ev));
    now = t;
    trace.series.push_back(detail::sample_live(live, now));
  }
  for (const auto& lf : live) {
    close_segment(lf, horizon, lf.position(horizon), true);
  }
  if (trace.series.back().t < horizon) {
    trace.series.push_back(detail::sample_live(live, horizon));
  }
  std::stable_sort(trace.segments.begin(), trace.segments.end(),
                   [](const FrontSegment& a, const FrontSegment& b) {
                     return a.id < b.id;
                   });
  return trace;
}

/// Initialize fronts from @p state and evolve them to @p horizon.
template <ConcaveFlux Flux>
Trace track(const Flux& flux, const PiecewiseConstantState& state, double h,
            double horizon) {
  const auto fronts = initialize_fronts(flux, state, h);
  return evolve(flux, std::span<const Front>(fronts), horizon,
                state.values.front());
}

/// Segments alive at @p t, ordered left to right.
inline std::vector<FrontSegment> live_segments(const Trace& trace, double t) {
  std::vector<FrontSegment> alive;
  for (const auto& s : trace.segments) {
    if (s.alive_at(t)) alive.push_back(s);
  }
  std::stable_sort(alive.begin(), alive.end(),
                   [t](const FrontSegment& a, const FrontSegment& b) {
                     const double xa = a.position(t);
                     const double xb = b.position(t);
                     if (xa != xb) return xa < xb;
                     return a.speed < b.speed;
                   });
  return alive;
}

/// Piecewise-constant solution at time @p t reconstructed from the trace.
inline PiecewiseConstantState state_at(const Trace& trace, double t) {
  if (!(t >= 0.0 && t <= trace.horizon)) {
    throw std::out_of_range("state_at: t outside [0, horizon]");
  }
  const auto alive = live_segments(trace, t);
  PiecewiseConstantState state;
  if (alive.empty()) {
    state.values = {trace.far_left};
    return state;
  }
  state.values = {alive.front().u_left};
  for (const auto& s : alive) {
    const double x = s.position(t);
    if (!state.breakpoints.empty() && x <= state.breakpoints.back()) {
      // Coincident fronts (a fan at its center, or a triple point).
      state.values.back() = s.u_right;
      continue;
    }
    state.breakpoints.push_back(x);
    state.values.push_back(s.u_right);
  }
  state.merge_equal_runs();
  return state;
}

inline std::vector<double> sample_solution(const Trace& trace, double t,
                                           std::span<const double> xs) {
  const auto state = state_at(trace, t);
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(state(x));
  return out;
}

struct DiagnosticsReport {
  std::vector<DiagnosticSample> series;
  bool tv_non_increasing = true;
  bool count_non_increasing = true;
  /// TV(u0) * sup|f'|
  double lipschitz_bound = 0.0;
  /// max over snapshot pairs of L1(u(t2) - u(t1)) / |t2 - t1|
  double max_l1_rate = 0.0;
  bool lipschitz_holds = true;
};

/// TV and front-count monotonicity over the event series, and the L1
/// Lipschitz-in-time estimate over every pair of @p times.
template <ConcaveFlux Flux>
DiagnosticsReport diagnostics(const Flux& flux, const Trace& trace,
                              std::span<const double> times) {
  DiagnosticsReport report;
  report.series = trace.series;
  for (std::size_t i = 1; i < trace.series.size(); ++i) {
    const auto& a = trace.series[i - 1];
    const auto& b = trace.series[i];
    if (b.tv > a.tv + 1e-12) report.tv_non_increasing = false;
    if (b.front_count > a.front_count) report.count_non_increasing = false;
  }
  for (const auto& ev : trace.events) {
    if (ev.tv_after > ev.tv_before + 1e-12) report.tv_non_increasing = false;
  }
  const double tv0 = trace.series.empty() ? 0.0 : trace.series.front().tv;
  report.lipschitz_bound = tv0 * max_abs_slope(flux);
  std::vector<PiecewiseConstantState> states;
  states.reserve(times.size());
  for (double t : times) states.push_back(state_at(trace, t));
  for (std::size_t i = 0; i < times.size(); ++i) {
    for (std::size_t j = i + 1; j < times.size(); ++j) {
      const double dt = std::abs(times[j] - times[i]);
      const double l1 = l1_distance(states[i], states[j]);
      if (dt == 0.0) {
        if (l1 > 1e-12) report.lipschitz_holds = false;
        continue;
      }
      report.max_l1_rate = std::max(report.max_l1_rate, l1 / dt);
      if (l1 > report.lipschitz_bound * dt * (1.0 + 1e-9) + 1e-12) {
        report.lipschitz_holds = false;
      }
    }
  }
  return report;
}

}  // namespace co2fronts

#endif  // CO2FRONTS_TRACKER_HPP_
