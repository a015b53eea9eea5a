#ifndef CO2FRONTS_CHARACTERISTICS_HPP_
#define CO2FRONTS_CHARACTERISTICS_HPP_

/// @file characteristics.hpp
/// @brief Method of characteristics for smooth data, the corner left by a
/// maximum, and characteristic fields for plotting.
///
/// Where u_x != 0 the speed is sigma f'(u) with sigma fixed by the sign of
/// u_t = -sigma f'(u) u_x. Minima open a constant plateau between the two
/// speeds; maxima collapse into a corner along which both branches meet.
/// Constant regions carry both families ("cross-hatch").

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "co2fronts/detail/bisect.hpp"
#include "co2fronts/flux.hpp"
#include "co2fronts/tracker.hpp"

namespace co2fronts {

/// Smooth initial profile on [lo, hi]; held constant outside the window.
struct SmoothProfile {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  double lo = -1.0;
  double hi = 1.0;

  double at(double x) const { return value(std::clamp(x, lo, hi)); }
  double slope_at(double x) const {
    return x < lo || x > hi ? 0.0 : derivative(x);
  }
};

/// base + amplitude * exp(-((x - center)/width)^2) on center +- 6 width.
inline SmoothProfile gaussian_profile(double base, double amplitude,
                                      double center, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("gaussian width must be > 0");
  SmoothProfile p;
  p.value = [=](double x) {
    const double z = (x - center) / width;
    return base + amplitude * std::exp(-z * z);
  };
  p.derivative = [=](double x) {
    const double z = (x - center) / width;
    return -2.0 * z / width * amplitude * std::exp(-z * z);
  };
  p.lo = center - 6.0 * width;
  p.hi = center + 6.0 * width;
  return p;
}

/// Derivatives smaller than this count as zero when locating flat regions.
inline constexpr double kFlatSlope = 1e-12;
/// Floor on the characteristic gradient denominator; below it a shock forms.
inline constexpr double kBlowupFloor = 1e-8;

namespace detail {

struct MonotonePiece {
  double a;
  double b;
  int sign;  // sign of u0' inside
};

/// Constant region [a, b] (a == b for an isolated extremum); the tails
/// extend to -inf / +inf.
struct FlatPiece {
  double a;
  double b;
  double u;
};

struct ProfileStructure {
  std::vector<MonotonePiece> monotone;
  std::vector<FlatPiece> flat;
};

inline int slope_sign(double d) {
  if (std::abs(d) <= kFlatSlope) return 0;
  return d > 0.0 ? 1 : -1;
}

/// Split the window into monotone pieces and flat pieces by sampling the
/// derivative and bisecting every sign change.
inline ProfileStructure analyze(const SmoothProfile& p, int samples = 4096) {
  if (!(p.hi > p.lo)) throw std::invalid_argument("profile window is empty");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> xs(static_cast<std::size_t>(samples) + 1);
  std::vector<int> sg(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    xs[k] = p.lo + (p.hi - p.lo) * static_cast<double>(k) / samples;
    sg[k] = slope_sign(p.derivative(xs[k]));
  }

  ProfileStructure out;
  double run_start = -inf;
  int run_sign = 0;  // the left tail is flat
  double piece_start = p.lo;
  auto close_run = [&](double end) {
    if (run_sign == 0) {
      const double probe = std::isinf(run_start) ? p.lo : run_start;
      out.flat.push_back({run_start, end, p.at(probe)});
    } else {
      out.monotone.push_back({piece_start, end, run_sign});
    }
  };
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const int s = sg[k];
    if (s == run_sign) continue;
    const double x0 = k == 0 ? p.lo : xs[k - 1];
    const double x1 = xs[k];
    double boundary;
    if (k == 0) {
      boundary = p.lo;
    } else if (run_sign != 0 && s != 0) {
      boundary = bisect([&](double x) { return p.derivative(x); }, x0, x1, 1e-15)
                     .value_or(0.5 * (x0 + x1));
    } else {
      auto g = [&](double x) {
        return slope_sign(p.derivative(x)) == 0 ? -1.0 : 1.0;
      };
      // Flat-to-sloped or sloped-to-flat transition.
      boundary = bisect(g, x0, x1, 1e-15).value_or(0.5 * (x0 + x1));
    }
    close_run(boundary);
    if (run_sign != 0 && s != 0) {
      out.flat.push_back({boundary, boundary, p.value(boundary)});
    }
    run_start = boundary;
    piece_start = boundary;
    run_sign = s;
  }
  if (run_sign == 0) {
    const double probe = std::isinf(run_start) ? p.lo : run_start;
    out.flat.push_back({run_start, inf, p.at(probe)});
  } else {
    out.monotone.push_back({piece_start, p.hi, run_sign});
    out.flat.push_back({p.hi, inf, p.value(p.hi)});
  }
  return out;
}

/// Multiplier picked by the sign rule for a point with u0' of sign
/// @p slope_sign: sigma = 1 when f'(u) u_x > 0 (u falls in time).
template <ConcaveFlux Flux>
double branch_sigma(const Flux& flux, double u, int slope_sign) {
  const double fp = flux.slope(u);
  if (fp * slope_sign > 0.0) return 1.0;
  if (fp * slope_sign < 0.0) return 1.0 - flux.trapping();
  return 1.0;  // f'(u) = 0: speed vanishes on either curve
}

template <ConcaveFlux Flux>
double branch_speed(const Flux& flux, double u, int slope_sign) {
  return branch_sigma(flux, u, slope_sign) * flux.slope(u);
}

}  // namespace detail

/// First time 1 + sigma u0' f''(u0) t reaches zero over the profile;
/// infinity when no characteristics converge.
template <ConcaveFlux Flux>
double shock_formation_time(const Flux& flux, const SmoothProfile& profile,
                            int samples = 20000) {
  auto rate = [&](double x) {
    const double d = profile.derivative(x);
    if (detail::slope_sign(d) == 0) return 0.0;
    const double u = profile.value(x);
    const double s = detail::branch_sigma(flux, u, d > 0.0 ? 1 : -1);
    return -s * d * flux.curvature(u);  // > 0 where characteristics focus
  };
  double best = 0.0;
  int best_k = -1;
  const double dx = (profile.hi - profile.lo) / samples;
  for (int k = 0; k <= samples; ++k) {
    const double r = rate(profile.lo + dx * k);
    if (r > best) {
      best = r;
      best_k = k;
    }
  }
  if (best_k < 0) return std::numeric_limits<double>::infinity();
  // Golden-section refinement of the sampled maximum.
  double a = std::max(profile.lo, profile.lo + dx * (best_k - 1));
  double b = std::min(profile.hi, profile.lo + dx * (best_k + 1));
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int i = 0; i < 80; ++i) {
    const double c = b - g * (b - a);
    const double d = a + g * (b - a);
    if (rate(c) > rate(d)) {
      b = d;
    } else {
      a = c;
    }
  }
  best = std::max(best, rate(0.5 * (a + b)));
  return 1.0 / best;
}

/// Solution of the smooth problem at time @p t for each query point.
/// Every monotone piece and every constant region contributes a branch;
/// where branches overlap (near a maximum) the lower one is the solution.
template <ConcaveFlux Flux>
std::vector<double> smooth_solve(const Flux& flux, const SmoothProfile& profile,
                                 double t, const std::vector<double>& xs) {
  if (!(t >= 0.0)) throw std::invalid_argument("smooth_solve: t must be >= 0");
  const double t_shock = shock_formation_time(flux, profile);
  if (t > 0.0 && 1.0 - t / t_shock < kBlowupFloor) {
    throw std::domain_error("smooth_solve: t is past shock formation (" +
                            std::to_string(t_shock) + ")");
  }
  const auto structure = detail::analyze(profile);
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& fp : structure.flat) {
      const auto cs = char_speeds(flux, fp.u);
      const double left = fp.a + cs.slower * t;
      const double right = fp.b + cs.faster * t;
      if (x >= left && x <= right) best = std::min(best, fp.u);
    }
    for (const auto& mp : structure.monotone) {
      auto image = [&](double xi) {
        return xi + detail::branch_speed(flux, profile.value(xi), mp.sign) * t;
      };
      if (x < image(mp.a) || x > image(mp.b)) continue;
      const auto xi = detail::bisect([&](double s) { return image(s) - x; },
                                     mp.a, mp.b, 1e-15);
      if (xi) best = std::min(best, profile.value(*xi));
    }
    if (std::isinf(best)) {
      throw std::logic_error("smooth_solve: no characteristic reaches x");
    }
    out.push_back(best);
  }
  return out;
}

struct CornerPath {
  std::vector<double> t;
  std::vector<double> gamma;
  std::vector<double> speed;       ///< gamma'(t)
  std::vector<double> value;       ///< u at the corner
  std::vector<double> ux_minus;
  std::vector<double> ux_plus;
  double c = 0.0;                  ///< f'(u0(xbar))
  bool shock_formed = false;
  double shock_time = std::numeric_limits<double>::infinity();
};

namespace detail {

struct CornerState {
  double u;
  double ux_minus;
  double ux_plus;
  double speed;
  double min_denominator;
};

template <ConcaveFlux Flux>
CornerState corner_state(const Flux& flux, const SmoothProfile& p, double xbar,
                         double c, double t, double gamma) {
  const double eps = flux.trapping();
  const double sigma_minus = c > 0.0 ? 1.0 : 1.0 - eps;
  const double sigma_plus = c > 0.0 ? 1.0 - eps : 1.0;
  auto foot = [&](double sigma, double a, double b) {
    auto g = [&](double xi) {
      return xi + sigma * flux.slope(p.value(xi)) * t - gamma;
    };
    const auto xi = bisect(g, a, b, 1e-15);
    if (!xi) throw std::runtime_error("corner_path: corner left the profile window");
    return *xi;
  };
  const double xl = foot(sigma_minus, p.lo, xbar);
  const double xr = foot(sigma_plus, xbar, p.hi);
  const double ul = p.value(xl);
  const double ur = p.value(xr);
  const double dl = 1.0 + sigma_minus * p.derivative(xl) * flux.curvature(ul) * t;
  const double dr = 1.0 + sigma_plus * p.derivative(xr) * flux.curvature(ur) * t;
  CornerState s;
  s.u = 0.5 * (ul + ur);
  s.ux_minus = p.derivative(xl) / dl;
  s.ux_plus = p.derivative(xr) / dr;
  s.min_denominator = std::min(dl, dr);
  // Continuity of u across the corner, differentiated in time.
  s.speed = flux.slope(s.u) *
            (sigma_minus * s.ux_minus - sigma_plus * s.ux_plus) /
            (s.ux_minus - s.ux_plus);
  return s;
}

}  // namespace detail

/// Path of the corner issuing from a strict maximum of the profile at
/// @p xbar, by classical RK4 with @p steps steps over [0, T]. The first
/// stage uses the limit speed (1 - eps/2) c in place of the singular
/// right-hand side.
template <ConcaveFlux Flux>
CornerPath corner_path(const Flux& flux, const SmoothProfile& profile,
                       double xbar, double T, int steps = 1000) {
  if (!(T > 0.0) || steps < 1) throw std::invalid_argument("corner_path: T > 0");
  if (!(xbar > profile.lo && xbar < profile.hi)) {
    throw std::invalid_argument("corner_path: xbar outside the profile window");
  }
  const double probe = 1e-4 * (profile.hi - profile.lo);
  const double top = profile.value(xbar);
  if (!(profile.value(xbar - probe) < top && profile.value(xbar + probe) < top)) {
    throw std::invalid_argument("corner_path: xbar is not a strict maximum");
  }
  CornerPath path;
  path.c = flux.slope(top);
  if (std::abs(path.c) <= 1e-12) {
    throw std::invalid_argument(
        "corner_path: maximum at u* (f' = 0); the corner speed is undefined");
  }
  const double v0 = (1.0 - 0.5 * flux.trapping()) * path.c;
  const double t_limit = shock_formation_time(flux, profile);
  const double dt = T / steps;
  if (flux.trapping() == 0.0) {
    // One curve: the maximum rides a single characteristic, no corner.
    for (int n = 0; n <= steps; ++n) {
      const double t = n == steps ? T : dt * n;
      if (t >= t_limit) {
        path.shock_formed = true;
        path.shock_time = t_limit;
        break;
      }
      path.t.push_back(t);
      path.gamma.push_back(xbar + path.c * t);
      path.speed.push_back(path.c);
      path.value.push_back(top);
      path.ux_minus.push_back(0.0);
      path.ux_plus.push_back(0.0);
    }
    return path;
  }
  auto rhs = [&](double t, double g) {
    if (t == 0.0) return v0;
    return detail::corner_state(flux, profile, xbar, path.c, t, g).speed;
  };
  double t = 0.0;
  double g = xbar;
  path.t.push_back(0.0);
  path.gamma.push_back(g);
  path.speed.push_back(v0);
  path.value.push_back(top);
  path.ux_minus.push_back(0.0);
  path.ux_plus.push_back(0.0);
  for (int n = 0; n < steps; ++n) {
    if (t + dt > t_limit) {
      // Characteristics cross somewhere in the profile first.
      path.shock_formed = true;
      path.shock_time = t_limit;
      break;
    }
    const double k1 = rhs(t, g);
    const double k2 = rhs(t + 0.5 * dt, g + 0.5 * dt * k1);
    const double k3 = rhs(t + 0.5 * dt, g + 0.5 * dt * k2);
    const double k4 = rhs(t + dt, g + dt * k3);
    g += dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    t = n + 1 == steps ? T : dt * (n + 1);
    const auto s = detail::corner_state(flux, profile, xbar, path.c, t, g);
    if (s.min_denominator < kBlowupFloor) {
      path.shock_formed = true;
      path.shock_time = t;
      break;
    }
    path.t.push_back(t);
    path.gamma.push_back(g);
    path.speed.push_back(s.speed);
    path.value.push_back(s.u);
    path.ux_minus.push_back(s.ux_minus);
    path.ux_plus.push_back(s.ux_plus);
  }
  return path;
}

/// Richardson estimate of gamma'(0) from the first two path nodes:
/// 2 D(dt) - D(2 dt) with D the forward difference quotient.
inline double corner_initial_speed(const CornerPath& path) {
  if (path.t.size() < 3) throw std::invalid_argument("corner path too short");
  const double d1 = (path.gamma[1] - path.gamma[0]) / (path.t[1] - path.t[0]);
  const double d2 = (path.gamma[2] - path.gamma[0]) / (path.t[2] - path.t[0]);
  return 2.0 * d1 - d2;
}

enum class Family { Fast, Slow };

inline const char* to_string(Family f) { return f == Family::Fast ? "fast" : "slow"; }

struct CharPolyline {
  int id = 0;
  Family family = Family::Fast;
  bool constant_region = false;
  std::vector<double> t;
  std::vector<double> x;
};

struct CharField {
  std::vector<CharPolyline> lines;
};

/// Seeding for char_field: @p seeds points on [x_lo, x_hi] at t = 0,
/// vertices every @p dt up to @p t_end, and (for traces) a seed every
/// @p front_dt along each front that emits characteristics.
struct CharGrid {
  double x_lo = -1.0;
  double x_hi = 1.0;
  int seeds = 21;
  double t_end = 1.0;
  double dt = 0.05;
  double front_dt = 0.25;
};

namespace detail {

inline void validate(const CharGrid& g) {
  if (!(g.x_hi > g.x_lo) || g.seeds < 1 || !(g.t_end > 0.0) || !(g.dt > 0.0) ||
      !(g.front_dt > 0.0)) {
    throw std::invalid_argument("char_field: malformed grid");
  }
}

inline double seed_x(const CharGrid& g, int i) {
  return g.seeds == 1 ? 0.5 * (g.x_lo + g.x_hi)
                      : g.x_lo + (g.x_hi - g.x_lo) * i / (g.seeds - 1);
}

}  // namespace detail

/// Characteristics of a tracked solution. Every region is constant, so
/// both families are drawn; each line runs straight until it enters a
/// front. Fronts additionally emit the families that leave them.
template <ConcaveFlux Flux>
CharField char_field(const Flux& flux, const Trace& trace, const CharGrid& grid) {
  detail::validate(grid);
  const double t_end = std::min(grid.t_end, trace.horizon);
  CharField field;
  auto trace_line = [&](double t0, double x0, double speed, Family fam,
                        int skip_id) {
    double t_hit = t_end;
    for (const auto& s : trace.segments) {
      if (s.id == skip_id || s.speed == speed) continue;
      const double th = (s.x_start - s.speed * s.t_start - x0 + speed * t0) /
                        (speed - s.speed);
      if (th <= t0 + 1e-12 || th >= t_hit) continue;
      if (th < s.t_start || th > s.t_end) continue;
      t_hit = th;
    }
    CharPolyline line;
    line.id = static_cast<int>(field.lines.size());
    line.family = fam;
    line.constant_region = true;
    line.t = {t0, t_hit};
    line.x = {x0, x0 + speed * (t_hit - t0)};
    field.lines.push_back(std::move(line));
  };
  const auto initial = state_at(trace, 0.0);
  for (int i = 0; i < grid.seeds; ++i) {
    const double x = detail::seed_x(grid, i);
    if (std::binary_search(initial.breakpoints.begin(), initial.breakpoints.end(), x)) {
      continue;
    }
    const auto cs = char_speeds(flux, initial(x));
    trace_line(0.0, x, cs.faster, Family::Fast, -1);
    trace_line(0.0, x, cs.slower, Family::Slow, -1);
  }
  for (const auto& s : trace.segments) {
    const double end = std::min(s.t_end, t_end);
    for (double t = s.t_start + 0.5 * grid.front_dt; t < end; t += grid.front_dt) {
      const double x = s.position(t);
      const auto left = char_speeds(flux, s.u_left);
      const auto right = char_speeds(flux, s.u_right);
      const double tol = kSpeedTolerance;
      if (left.faster < s.speed - tol) trace_line(t, x, left.faster, Family::Fast, s.id);
      if (left.slower < s.speed - tol) trace_line(t, x, left.slower, Family::Slow, s.id);
      if (right.faster > s.speed + tol) trace_line(t, x, right.faster, Family::Fast, s.id);
      if (right.slower > s.speed + tol) trace_line(t, x, right.slower, Family::Slow, s.id);
    }
  }
  return field;
}

/// Characteristics of the smooth solution before shock formation. A line
/// stops at the last vertex where it still carries the solution value
/// (it has run into a corner).
template <ConcaveFlux Flux>
CharField char_field(const Flux& flux, const SmoothProfile& profile,
                     const CharGrid& grid) {
  detail::validate(grid);
  const double t_shock = shock_formation_time(flux, profile);
  const double t_end = std::min(grid.t_end, t_shock * (1.0 - 1e-6));
  const auto structure = detail::analyze(profile);
  CharField field;
  auto emit = [&](double x0, double u, double speed, Family fam, bool flat) {
    CharPolyline line;
    line.id = static_cast<int>(field.lines.size());
    line.family = fam;
    line.constant_region = flat;
    line.t.push_back(0.0);
    line.x.push_back(x0);
    const int n = static_cast<int>(std::ceil(t_end / grid.dt - 1e-9));
    for (int k = 1; k <= n; ++k) {
      const double t = std::min(t_end, grid.dt * k);
      const double x = x0 + speed * t;
      const double v = smooth_solve(flux, profile, t, {x}).front();
      if (std::abs(v - u) > 1e-8) break;
      line.t.push_back(t);
      line.x.push_back(x);
    }
    if (line.t.size() > 1) field.lines.push_back(std::move(line));
  };
  auto emit_both = [&](double x0, double u) {
    const auto cs = char_speeds(flux, u);
    emit(x0, u, cs.faster, Family::Fast, true);
    emit(x0, u, cs.slower, Family::Slow, true);
  };
  for (int i = 0; i < grid.seeds; ++i) {
    const double x = detail::seed_x(grid, i);
    const double d = profile.slope_at(x);
    const double u = profile.at(x);
    if (detail::slope_sign(d) == 0) {
      emit_both(x, u);
      continue;
    }
    const double speed = detail::branch_speed(flux, u, d > 0.0 ? 1 : -1);
    const auto cs = char_speeds(flux, u);
    emit(x, u, speed, speed == cs.faster ? Family::Fast : Family::Slow, false);
  }
  for (const auto& fp : structure.flat) {
    if (fp.a == fp.b) emit_both(fp.a, fp.u);
  }
  return field;
}

}  // namespace co2fronts

#endif  // CO2FRONTS_CHARACTERISTICS_HPP_
