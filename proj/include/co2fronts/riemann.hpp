#ifndef CO2FRONTS_RIEMANN_HPP_
#define CO2FRONTS_RIEMANN_HPP_

/// @file riemann.hpp
/// @brief Exact single Riemann problem for the two-flux law.
///
/// An up-jump (uL < uR) is an admissible shock; a down-jump is a centered
/// rarefaction, which becomes kinked when it straddles u*. The flux curve
/// used by a jump is fixed by the sign of its chord slope and the
/// direction of the jump (see classify_sigma).

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "co2fronts/detail/bisect.hpp"
#include "co2fronts/flux.hpp"

namespace co2fronts {

/// Flux differences at or below this are treated as a stationary jump.
inline constexpr double kFluxTie = 1e-15;
/// Speed comparisons in admissibility checks.
inline constexpr double kSpeedTolerance = 1e-12;

enum class FrontKind { AdmissibleShock, ExpansionShock };

inline const char* to_string(FrontKind k) {
  return k == FrontKind::AdmissibleShock ? "shock" : "expansion";
}

/// A propagating jump discontinuity.
struct Front {
  double x = 0.0;
  double u_left = 0.0;
  double u_right = 0.0;
  double speed = 0.0;
  FrontKind kind = FrontKind::AdmissibleShock;
  Regime regime = Regime::Stationary;

  double jump() const { return std::abs(u_right - u_left); }
};

/// Centered rarefaction connecting u_left down to u_right.
struct RarefactionFan {
  double u_left = 0.0;
  double u_right = 0.0;
  double x0 = 0.0;
  double t0 = 0.0;
  bool split = false;  ///< straddles u*, so the fan has a corner
  double trailing_speed = 0.0;
  double leading_speed = 0.0;
};

struct ConstantState {
  double u = 0.0;
};

using RiemannSolution = std::variant<ConstantState, Front, RarefactionFan>;

/// Raw chord slope (f(uR) - f(uL)) / (uR - uL); its sign does not depend
/// on which curve is used.
template <ConcaveFlux Flux>
double chord_slope(const Flux& flux, double u_left, double u_right) {
  const double df = flux.value(u_right) - flux.value(u_left);
  if (std::abs(df) <= kFluxTie) return 0.0;
  return df / (u_right - u_left);
}

/// Flux curve for a jump: Upper when a fixed observer sees u fall as the
/// jump passes, Lower when u rises, Stationary for zero chord slope.
template <ConcaveFlux Flux>
Regime classify_sigma(const Flux& flux, double u_left, double u_right) {
  if (u_left == u_right) {
    throw std::invalid_argument("classify_sigma: equal states carry no wave");
  }
  const double s = chord_slope(flux, u_left, u_right);
  if (s == 0.0) return Regime::Stationary;
  const bool up = u_left < u_right;
  return (s > 0.0) == up ? Regime::Upper : Regime::Lower;
}

template <ConcaveFlux Flux>
double shock_speed(const Flux& flux, double u_left, double u_right) {
  const Regime r = classify_sigma(flux, u_left, u_right);
  if (r == Regime::Stationary) return 0.0;
  return sigma_of(r, flux.trapping()) * chord_slope(flux, u_left, u_right);
}

template <ConcaveFlux Flux>
Front make_front(const Flux& flux, double u_left, double u_right,
                 double x = 0.0) {
  Front front;
  front.x = x;
  front.u_left = u_left;
  front.u_right = u_right;
  front.regime = classify_sigma(flux, u_left, u_right);
  front.speed = shock_speed(flux, u_left, u_right);
  front.kind = u_left < u_right ? FrontKind::AdmissibleShock
                                : FrontKind::ExpansionShock;
  return front;
}

template <ConcaveFlux Flux>
RarefactionFan make_fan(const Flux& flux, double u_left, double u_right,
                        double x0 = 0.0, double t0 = 0.0) {
  if (!(u_left > u_right)) {
    throw std::invalid_argument("rarefaction requires u_left > u_right");
  }
  const double star = flux.maximizer();
  const double lower = 1.0 - flux.trapping();
  RarefactionFan fan;
  fan.u_left = u_left;
  fan.u_right = u_right;
  fan.x0 = x0;
  fan.t0 = t0;
  fan.split = u_right < star && star < u_left;
  const double sigma_left = u_left > star ? 1.0 : lower;
  const double sigma_right = u_right < star ? lower : 1.0;
  fan.trailing_speed = sigma_left * flux.slope(u_left);
  fan.leading_speed = sigma_right * flux.slope(u_right);
  return fan;
}

template <ConcaveFlux Flux>
RiemannSolution solve_riemann(const Flux& flux, double u_left, double u_right,
                              double x0 = 0.0) {
  u_left = checked_saturation(u_left);
  u_right = checked_saturation(u_right);
  if (u_left == u_right) return ConstantState{u_left};
  if (u_left < u_right) return make_front(flux, u_left, u_right, x0);
  return make_fan(flux, u_left, u_right, x0);
}

/// Fan value at similarity coordinate y = (x - x0)/(t - t0): the u in
/// [u_right, u_left] with sigma f'(u) = y, where sigma = 1 for y < 0 and
/// 1 - epsilon for y > 0.
template <ConcaveFlux Flux>
double sample_rarefaction(const Flux& flux, const RarefactionFan& fan,
                          double y) {
  if (y < fan.trailing_speed - kSpeedTolerance ||
      y > fan.leading_speed + kSpeedTolerance) {
    throw std::invalid_argument("sample_rarefaction: y outside fan");
  }
  if (y <= fan.trailing_speed) return fan.u_left;
  if (y >= fan.leading_speed) return fan.u_right;
  if (y == 0.0) {
    return std::clamp(flux.maximizer(), fan.u_right, fan.u_left);
  }
  const double sigma = y < 0.0 ? 1.0 : 1.0 - flux.trapping();
  auto residual = [&](double u) { return sigma * flux.slope(u) - y; };
  const auto root = detail::bisect(residual, fan.u_right, fan.u_left, 1e-16);
  // The bracket always changes sign strictly inside the fan.
  return root.value_or(y < 0.0 ? fan.u_left : fan.u_right);
}

/// Exact solution value at (x, t) for a solution centered at (x0, 0).
template <ConcaveFlux Flux>
double sample_riemann(const Flux& flux, const RiemannSolution& solution,
                      double x, double t) {
  if (const auto* c = std::get_if<ConstantState>(&solution)) return c->u;
  if (const auto* s = std::get_if<Front>(&solution)) {
    return x < s->x + s->speed * t ? s->u_left : s->u_right;
  }
  const auto& fan = std::get<RarefactionFan>(solution);
  const double dt = t - fan.t0;
  if (dt <= 0.0) return x < fan.x0 ? fan.u_left : fan.u_right;
  const double y = (x - fan.x0) / dt;
  if (y <= fan.trailing_speed) return fan.u_left;
  if (y >= fan.leading_speed) return fan.u_right;
  return sample_rarefaction(flux, fan, y);
}

/// Jump in u_x across the fan center as stated by the closed-form
/// 1/(tau eps f''(u*)); for the model flux this is -sqrt(M)/(2 tau eps).
template <ConcaveFlux Flux>
double slope_jump(const Flux& flux, double tau) {
  if (!(tau > 0.0)) throw std::domain_error("slope_jump: tau must be > 0");
  if (!(flux.trapping() > 0.0)) {
    throw std::domain_error("slope_jump: undefined for epsilon = 0");
  }
  return 1.0 / (tau * flux.trapping() * flux.curvature(flux.maximizer()));
}

/// Jump u_x(0+) - u_x(0-) of the fan as actually sampled: the one-sided
/// slopes are 1/(tau (1-eps) f'') and 1/(tau f''), so the jump is
/// eps / ((1-eps) tau f''(u*)).
template <ConcaveFlux Flux>
double fan_center_slope_jump(const Flux& flux, double tau) {
  if (!(tau > 0.0)) {
    throw std::domain_error("fan_center_slope_jump: tau must be > 0");
  }
  const double eps = flux.trapping();
  if (!(eps < 1.0)) {
    throw std::domain_error("fan_center_slope_jump: epsilon must be < 1");
  }
  return eps / ((1.0 - eps) * tau * flux.curvature(flux.maximizer()));
}

struct AdmissibilityReport {
  bool admissible = false;
  /// The right slower family enters (speed >= slower(uR)).
  bool right_slower_enters = false;
  /// The left slower family emanates from the shock (slower(uL) < speed).
  bool left_slower_leaves = false;
  /// Some characteristic speed coincides with the shock speed.
  bool grazing = false;
  std::string diagnostic;
};

/// Shock admissibility: the faster family must enter from both sides,
/// faster(uL) >= speed >= faster(uR). Equality (grazing) is admitted.
template <ConcaveFlux Flux>
AdmissibilityReport check_admissibility(const Flux& flux, const Front& front) {
  AdmissibilityReport report;
  const CharSpeeds left = char_speeds(flux, front.u_left);
  const CharSpeeds right = char_speeds(flux, front.u_right);
  const double speed = front.speed;
  const double tol = kSpeedTolerance;
  if (!(front.u_left < front.u_right)) {
    report.diagnostic = "down-jump cannot be an admissible shock";
    return report;
  }
  const bool left_enters = left.faster >= speed - tol;
  const bool right_enters = speed >= right.faster - tol;
  report.admissible = left_enters && right_enters;
  report.right_slower_enters = speed >= right.slower - tol;
  report.left_slower_leaves = left.slower < speed - tol;
  report.grazing = std::abs(left.slower - speed) <= tol ||
                   std::abs(left.faster - speed) <= tol ||
                   std::abs(right.faster - speed) <= tol ||
                   std::abs(right.slower - speed) <= tol;
  if (!report.admissible) {
    report.diagnostic = left_enters ? "faster family leaves on the right"
                                    : "faster family leaves on the left";
  } else if (!report.right_slower_enters) {
    report.admissible = false;
    report.diagnostic = "right slower family leaves an admissible shock";
  } else if (report.grazing) {
    report.diagnostic = "grazing characteristic contact";
  } else if (report.left_slower_leaves) {
    report.diagnostic = "left slower family leaves";
  }
  return report;
}

/// Replace a fan by ceil((uL - uR)/h) expansion shocks through equally
/// spaced intermediate values, ordered left to right.
template <ConcaveFlux Flux>
std::vector<Front> discretize_rarefaction(const Flux& flux,
                                          const RarefactionFan& fan,
                                          double h) {
  if (!(h > 0.0)) throw std::invalid_argument("discretize_rarefaction: h > 0");
  const double span = fan.u_left - fan.u_right;
  const auto n = static_cast<int>(
      std::max(1.0, std::ceil(span / h - 1e-9)));
  std::vector<Front> fronts;
  fronts.reserve(static_cast<std::size_t>(n));
  double upper = fan.u_left;
  for (int k = 1; k <= n; ++k) {
    const double lower =
        k == n ? fan.u_right : fan.u_left - span * static_cast<double>(k) / n;
    fronts.push_back(make_front(flux, upper, lower, fan.x0));
    upper = lower;
  }
  return fronts;
}

}  // namespace co2fronts

#endif  // CO2FRONTS_RIEMANN_HPP_
