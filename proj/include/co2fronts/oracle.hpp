#ifndef CO2FRONTS_ORACLE_HPP_
#define CO2FRONTS_ORACLE_HPP_

/// @file oracle.hpp
/// @brief Reference solutions independent of the front tracker: a shock
/// integrated through an exactly sampled fan, and a Godunov finite-volume
/// scheme with a cell-wise flux switch.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "co2fronts/flux.hpp"
#include "co2fronts/interactions.hpp"
#include "co2fronts/riemann.hpp"
#include "co2fronts/tracker.hpp"

namespace co2fronts {

// ---------------------------------------------------------------------------
// Sampled solutions and L1 comparison

/// A piecewise-constant function known on [lo, hi].
struct SampledSolution {
  PiecewiseConstantState state;
  double lo = 0.0;
  double hi = 0.0;
};

/// Midpoint samples of @p fn on @p n equal cells of [lo, hi].
inline SampledSolution sample_function(const std::function<double(double)>& fn,
                                       double lo, double hi, int n) {
  if (!(hi > lo) || n < 1) throw std::invalid_argument("sample_function: bad grid");
  SampledSolution s;
  s.lo = lo;
  s.hi = hi;
  const double dx = (hi - lo) / n;
  s.state.values.clear();
  for (int i = 0; i < n; ++i) {
    if (i > 0) s.state.breakpoints.push_back(lo + dx * i);
    s.state.values.push_back(fn(lo + dx * (i + 0.5)));
  }
  return s;
}

inline SampledSolution sample_trace(const Trace& trace, double t, double lo,
                                    double hi) {
  if (!(hi > lo)) throw std::invalid_argument("sample_trace: empty window");
  return {state_at(trace, t), lo, hi};
}

/// L1 distance over @p lo..@p hi, exact for the piecewise-constant overlay.
inline double compare_l1(const SampledSolution& a, const SampledSolution& b,
                         double lo, double hi) {
  if (!(hi > lo)) throw std::invalid_argument("compare_l1: empty window");
  if (lo < std::max(a.lo, b.lo) || hi > std::min(a.hi, b.hi)) {
    throw std::invalid_argument("compare_l1: window not covered by both inputs");
  }
  std::vector<double> xs{lo, hi};
  for (const auto* s : {&a, &b}) {
    const auto& bp = s->state.breakpoints;
    auto first = std::upper_bound(bp.begin(), bp.end(), lo);
    auto last = std::lower_bound(bp.begin(), bp.end(), hi);
    xs.insert(xs.end(), first, last);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  double total = 0.0;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double mid = 0.5 * (xs[i - 1] + xs[i]);
    total += std::abs(a.state(mid) - b.state(mid)) * (xs[i] - xs[i - 1]);
  }
  return total;
}

/// Over the common window of both inputs.
inline double compare_l1(const SampledSolution& a, const SampledSolution& b) {
  const double lo = std::max(a.lo, b.lo);
  const double hi = std::min(a.hi, b.hi);
  if (!(hi > lo)) throw std::invalid_argument("compare_l1: disjoint windows");
  return compare_l1(a, b, lo, hi);
}

// ---------------------------------------------------------------------------
// Shock through a centered fan

enum class ShockSide { LeftOfFan, RightOfFan };
enum class PathStatus { Absorbed, Asymptotic, Unresolved };

inline const char* to_string(PathStatus s) {
  switch (s) {
    case PathStatus::Absorbed:
      return "absorbed";
    case PathStatus::Asymptotic:
      return "asymptotic";
    case PathStatus::Unresolved:
      return "unresolved";
  }
  return "?";
}

struct ShockPath {
  std::vector<double> t;
  std::vector<double> y;
  std::vector<double> speed;
  std::vector<double> fan_value;  ///< state on the fan side of the shock
  ShockSide side = ShockSide::LeftOfFan;
  RarefactionFan fan;
  double u_out = 0.0;
  PathStatus status = PathStatus::Unresolved;
  double absorbed_time = std::numeric_limits<double>::quiet_NaN();
  double asymptotic_time = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> limit_speed;  ///< speed of a persistent middle state

  /// Linear interpolation of the position; held constant outside the grid.
  double position(double tq) const {
    if (tq <= t.front()) return y.front();
    if (tq >= t.back()) return y.back();
    const auto it = std::upper_bound(t.begin(), t.end(), tq);
    const auto i = static_cast<std::size_t>(it - t.begin());
    const double w = (tq - t[i - 1]) / (t[i] - t[i - 1]);
    return y[i - 1] + w * (y[i] - y[i - 1]);
  }
};

namespace detail {

template <ConcaveFlux Flux>
double fan_state(const Flux& flux, const RarefactionFan& fan, double x,
                 double t) {
  const double dt = t - fan.t0;
  if (dt <= 0.0) return x < fan.x0 ? fan.u_left : fan.u_right;
  const double y = (x - fan.x0) / dt;
  if (y <= fan.trailing_speed) return fan.u_left;
  if (y >= fan.leading_speed) return fan.u_right;
  return sample_rarefaction(flux, fan, y);
}

/// Fan value where a shock from @p u_out stops gaining on (or losing to)
/// the fan characteristics, if the fan is not fully absorbed.
template <ConcaveFlux Flux>
std::optional<double> persistent_fan_state(const Flux& flux,
                                           const RarefactionFan& fan,
                                           double u_out, ShockSide side) {
  if (side == ShockSide::RightOfFan) {
    return persistent_middle_state(flux, fan.u_left, fan.u_right, u_out);
  }
  // Shock on the trailing side: it gains while its speed exceeds the
  // fan speed of the value it currently meets (scanned from u_left down).
  auto gain = [&](double v) { return shock_speed(flux, u_out, v) - fan_speed(flux, v); };
  const int n = 2000;
  double prev = fan.u_left;
  if (!(gain(prev) > kParallelSpeed)) return std::nullopt;
  for (int k = 1; k <= n; ++k) {
    const double v = fan.u_left - (fan.u_left - fan.u_right) * k / n;
    if (gain(v) <= 0.0) return bisect(gain, v, prev, 1e-14);
    prev = v;
  }
  return std::nullopt;
}

}  // namespace detail

/// Integrate a shock between the constant @p u_out and a centered fan,
/// sampling the fan exactly. Speeds come from shock_speed, so the curve is
/// re-selected by the sign rule at every evaluation. The path spans
/// [fan.t0, T]; the status records whether the shock crossed the whole fan
/// (absorbed) or settled within 1e-4 of a persistent speed (asymptotic).
template <ConcaveFlux Flux>
ShockPath shock_through_rarefaction(const Flux& flux, double u_out,
                                    const RarefactionFan& fan, double y0,
                                    double T, ShockSide side,
                                    double rtol = 1e-8) {
  if (!(fan.u_left > fan.u_right)) throw std::invalid_argument("invalid fan");
  const bool left = side == ShockSide::LeftOfFan;
  if (left ? !(u_out < fan.u_right && y0 <= fan.x0)
           : !(u_out > fan.u_left && y0 >= fan.x0)) {
    throw std::invalid_argument(
        "shock_through_rarefaction: shock must be an up-jump on the outer side "
        "of the fan");
  }
  if (!(T > fan.t0)) throw std::invalid_argument("shock_through_rarefaction: T");
  ShockPath path;
  path.side = side;
  path.fan = fan;
  path.u_out = u_out;
  if (const auto v = detail::persistent_fan_state(flux, fan, u_out, side)) {
    path.limit_speed = fan_speed(flux, *v);
  }
  auto inner = [&](double t, double y) { return detail::fan_state(flux, fan, y, t); };
  auto rhs = [&](double t, double y) {
    const double v = inner(t, y);
    return left ? shock_speed(flux, u_out, v) : shock_speed(flux, v, u_out);
  };
  auto rk4 = [&](double t, double y, double h) {
    const double k1 = rhs(t, y);
    const double k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1);
    const double k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2);
    const double k4 = rhs(t + h, y + h * k3);
    return y + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
  };
  auto record = [&](double t, double y) {
    path.t.push_back(t);
    path.y.push_back(y);
    path.speed.push_back(rhs(t, y));
    path.fan_value.push_back(inner(t, y));
  };
  double t = fan.t0;
  double y = y0;
  record(t, y);
  const double h_max = (T - fan.t0) / 400.0;
  double h = std::min(1e-3, h_max);
  bool absorbed = false;
  while (t < T) {
    h = std::min(h, T - t);
    const double full = rk4(t, y, h);
    const double half = rk4(t + 0.5 * h, rk4(t, y, 0.5 * h), 0.5 * h);
    const double err = std::abs(half - full) / 15.0;
    const double tol = rtol * std::max(1.0, std::abs(half));
    if (err > tol && h > 1e-12) {
      h *= std::max(0.1, 0.9 * std::pow(tol / err, 0.2));
      continue;
    }
    t = t + h >= T ? T : t + h;
    y = half + (half - full) / 15.0;
    record(t, y);
    const double dt = t - fan.t0;
    if (!absorbed) {
      const double edge = left ? fan.x0 + fan.leading_speed * dt
                               : fan.x0 + fan.trailing_speed * dt;
      if (left ? y >= edge : y <= edge) {
        absorbed = true;
        path.absorbed_time = t;
      }
    }
    if (std::isnan(path.asymptotic_time) && path.limit_speed &&
        std::abs(path.speed.back() - *path.limit_speed) < 1e-4) {
      path.asymptotic_time = t;
    }
    if (err > 0.0) {
      h *= std::min(4.0, 0.9 * std::pow(tol / err, 0.2));
    } else {
      h *= 4.0;
    }
    h = std::min(h, h_max);
  }
  if (absorbed) {
    path.status = PathStatus::Absorbed;
  } else if (!std::isnan(path.asymptotic_time)) {
    path.status = PathStatus::Asymptotic;
  }
  return path;
}

// ---------------------------------------------------------------------------
// Finite volumes

struct GridSpec {
  double x_lo = -1.0;
  double x_hi = 1.0;
  double dx = 0.01;
  double cfl = 0.9;
  std::optional<double> peclet;  ///< empty: purely hyperbolic
};

struct GridSolution {
  double x_lo = 0.0;
  double dx = 0.0;
  std::vector<double> centers;
  std::vector<double> times;
  std::vector<std::vector<double>> values;  ///< one row per time
  int steps = 0;
  double dt = 0.0;
  std::string sigma_rule;

  SampledSolution snapshot(std::size_t k) const {
    SampledSolution s;
    s.lo = x_lo;
    s.hi = x_lo + dx * static_cast<double>(centers.size());
    s.state.values = values.at(k);
    for (std::size_t i = 1; i < centers.size(); ++i) {
      s.state.breakpoints.push_back(x_lo + dx * static_cast<double>(i));
    }
    return s;
  }
};

inline constexpr const char* kCellSigmaRule =
    "cell-wise: sigma_i = 1 - eps where the predicted update of cell i is "
    "positive, 1 otherwise; two passes (previous-step sigma, then re-selected)";

/// Godunov flux for a concave f with maximizer m.
template <ConcaveFlux Flux>
double godunov_flux(const Flux& flux, double a, double b) {
  if (a <= b) return std::min(flux.value(a), flux.value(b));
  const double m = flux.maximizer();
  if (b <= m && m <= a) return flux.value(m);
  return std::max(flux.value(a), flux.value(b));
}

/// Explicit Godunov scheme for u_t + sigma f(u)_x = Pe^-1 sigma (f u_x)_x
/// with zero-gradient boundaries. Snapshots are taken at @p times (each
/// within [0, T]), always including T.
template <ConcaveFlux Flux>
GridSolution fv_solve(const Flux& flux, const std::vector<double>& initial,
                      const GridSpec& spec, double T,
                      std::vector<double> times = {}) {
  if (!(spec.dx > 0.0)) throw std::invalid_argument("fv_solve: dx must be > 0");
  if (!(spec.cfl > 0.0 && spec.cfl <= 1.0)) {
    throw std::invalid_argument("fv_solve: CFL number must lie in (0, 1]");
  }
  if (spec.peclet && !(*spec.peclet > 0.0)) {
    throw std::invalid_argument("fv_solve: Peclet number must be > 0");
  }
  if (!(T >= 0.0)) throw std::invalid_argument("fv_solve: T must be >= 0");
  const std::size_t n = initial.size();
  if (n < 2) throw std::invalid_argument("fv_solve: need at least two cells");
  times.push_back(T);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  if (times.front() < 0.0 || times.back() > T) {
    throw std::invalid_argument("fv_solve: snapshot time outside [0, T]");
  }

  GridSolution out;
  out.x_lo = spec.x_lo;
  out.dx = spec.dx;
  out.sigma_rule = kCellSigmaRule;
  for (std::size_t i = 0; i < n; ++i) {
    out.centers.push_back(spec.x_lo + spec.dx * (static_cast<double>(i) + 0.5));
  }
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = checked_saturation(initial[i]);

  const double eps = flux.trapping();
  double dt = spec.cfl * spec.dx / max_abs_slope(flux);
  if (spec.peclet) {
    const double fmax = flux.value(flux.maximizer());
    dt = std::min(dt, 0.45 * spec.dx * spec.dx * *spec.peclet / fmax);
  }
  out.dt = dt;

  std::vector<double> face(n + 1), rate(n), sigma(n, 1.0);
  auto residual = [&]() {
    for (std::size_t k = 0; k <= n; ++k) {
      const double a = u[k == 0 ? 0 : k - 1];
      const double b = u[k == n ? n - 1 : k];
      double g = godunov_flux(flux, a, b);
      if (spec.peclet) {
        g -= flux.value(0.5 * (a + b)) * (b - a) / (spec.dx * *spec.peclet);
      }
      face[k] = g;
    }
    for (std::size_t i = 0; i < n; ++i) rate[i] = -(face[i + 1] - face[i]) / spec.dx;
  };

  double t = 0.0;
  std::size_t next = 0;
  while (true) {
    while (next < times.size() && times[next] <= t) {
      out.times.push_back(times[next]);
      out.values.push_back(u);
      ++next;
    }
    if (next == times.size()) break;
    const double step = std::min(dt, times[next] - t);
    residual();
    // Pass 1 predicts with last step's sigma; pass 2 re-selects sigma from
    // the sign of that prediction and applies it.
    for (std::size_t i = 0; i < n; ++i) {
      const double predicted = sigma[i] * rate[i] * step;
      if (predicted > 0.0) {
        sigma[i] = 1.0 - eps;
      } else if (predicted < 0.0) {
        sigma[i] = 1.0;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double v = u[i] + sigma[i] * rate[i] * step;
      if (!std::isfinite(v)) throw std::runtime_error("fv_solve: non-finite value");
      u[i] = checked_saturation(v);
    }
    ++out.steps;
    t = step == times[next] - t ? times[next] : t + step;
  }
  return out;
}

/// Cell averages of a piecewise-constant state on the grid of @p spec.
inline std::vector<double> cell_averages(const PiecewiseConstantState& s,
                                         const GridSpec& spec) {
  if (!(spec.x_hi > spec.x_lo) || !(spec.dx > 0.0)) {
    throw std::invalid_argument("cell_averages: bad grid");
  }
  const auto n = static_cast<std::size_t>(
      std::llround(std::ceil((spec.x_hi - spec.x_lo) / spec.dx - 1e-9)));
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = spec.x_lo + spec.dx * static_cast<double>(i);
    const double b = a + spec.dx;
    double acc = 0.0;
    double x = a;
    auto it = std::upper_bound(s.breakpoints.begin(), s.breakpoints.end(), a);
    while (x < b) {
      const double end = it == s.breakpoints.end() ? b : std::min(b, *it);
      acc += s(x) * (end - x);
      x = end;
      if (it != s.breakpoints.end()) ++it;
    }
    out[i] = acc / spec.dx;
  }
  return out;
}

template <ConcaveFlux Flux>
GridSolution fv_solve(const Flux& flux, const PiecewiseConstantState& initial,
                      const GridSpec& spec, double T,
                      std::vector<double> times = {}) {
  return fv_solve(flux, cell_averages(initial, spec), spec, T, std::move(times));
}

}  // namespace co2fronts

#endif  // CO2FRONTS_ORACLE_HPP_
