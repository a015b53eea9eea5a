#ifndef CO2FRONTS_INTERACTIONS_HPP_
#define CO2FRONTS_INTERACTIONS_HPP_

/// @file interactions.hpp
/// @brief Binary wave interactions: collision prediction, resolution of a
/// collision into at most one outgoing front, the separation thresholds
/// for rarefaction-shock pairs, and their asymptotic middle states.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "co2fronts/detail/bisect.hpp"
#include "co2fronts/flux.hpp"
#include "co2fronts/riemann.hpp"

namespace co2fronts {

/// Fronts whose speeds differ by less than this never collide.
inline constexpr double kParallelSpeed = 1e-10;
/// Colliding fronts must share their middle state to this accuracy.
inline constexpr double kStateMatch = 1e-12;
/// Slack when comparing a state against a bisected threshold.
inline constexpr double kThresholdSlack = 1e-9;

struct Collision {
  double t = 0.0;
  double x = 0.0;
};

/// Meeting point of two fronts at x_left <= x_right at time t0, if the
/// left one is strictly faster.
inline std::optional<Collision> collision_time(double x_left, double speed_left,
                                               double x_right,
                                               double speed_right,
                                               double t0 = 0.0) {
  const double closing = speed_left - speed_right;
  if (!(closing > kParallelSpeed)) return std::nullopt;
  const double gap = std::max(0.0, x_right - x_left);
  const double dt = gap / closing;
  return Collision{t0 + dt, x_left + speed_left * dt};
}

struct InteractionOutcome {
  std::vector<Front> outgoing;
  double tv_before = 0.0;
  double tv_after = 0.0;
  std::optional<Collision> collision;
};

/// Two adjacent fronts meeting at @p x join their outer states: an up-jump
/// leaves one admissible shock, a down-jump one expansion shock, and equal
/// outer states annihilate.
template <ConcaveFlux Flux>
InteractionOutcome resolve_collision(const Flux& flux, const Front& left,
                                     const Front& right, double x) {
  if (std::abs(left.u_right - right.u_left) > kStateMatch) {
    throw std::logic_error("resolve_collision: middle states differ (" +
                           std::to_string(left.u_right) + " vs " +
                           std::to_string(right.u_left) + ")");
  }
  InteractionOutcome outcome;
  outcome.tv_before = left.jump() + right.jump();
  const double ul = left.u_left;
  const double ur = right.u_right;
  if (std::abs(ul - ur) <= kStateMatch) {
    outcome.tv_after = 0.0;
    return outcome;
  }
  Front out = make_front(flux, ul, ur, x);
  if (out.kind == FrontKind::ExpansionShock) {
    double bound = 0.0;
    if (left.kind == FrontKind::ExpansionShock) bound = left.jump();
    if (right.kind == FrontKind::ExpansionShock) {
      bound = std::max(bound, right.jump());
    }
    if (out.jump() > bound + kStateMatch) {
      throw std::logic_error("resolve_collision: expansion jump grew");
    }
  }
  outcome.tv_after = out.jump();
  outcome.outgoing.push_back(out);
  return outcome;
}

namespace detail {

// Chord slope without the stationary tie; a == b gives the tangent.
template <ConcaveFlux Flux>
double secant(const Flux& flux, double a, double b) {
  if (a == b) return flux.slope(a);
  return (flux.value(b) - flux.value(a)) / (b - a);
}

}  // namespace detail

/// For uM <= u*: the state above uM whose (upper-curve) chord from uM has
/// the slope (1-eps) f'(uM) of the fan's leading edge. Rarefaction and
/// shock separate when uM < uR <= threshold.
template <ConcaveFlux Flux>
double threshold_tilde_M(const Flux& flux, double u_mid) {
  u_mid = checked_saturation(u_mid);
  if (u_mid > flux.maximizer() + kDomainTolerance) {
    throw std::invalid_argument("threshold_tilde_M requires uM <= u*");
  }
  const double eps = flux.trapping();
  const double target = (1.0 - eps) * flux.slope(u_mid);
  if (eps == 0.0 || flux.slope(u_mid) <= 0.0) return u_mid;
  auto g = [&](double x) { return detail::secant(flux, u_mid, x) - target; };
  return detail::bisect(g, u_mid, 1.0).value_or(1.0);
}

/// For u* < uM < 1: the state above uM where the lower-curve chord from uM
/// matches f'(uM), saturating at 1.
template <ConcaveFlux Flux>
double threshold_bar_M(const Flux& flux, double u_mid) {
  u_mid = checked_saturation(u_mid);
  if (!(u_mid > flux.maximizer()) || u_mid >= 1.0) {
    throw std::invalid_argument("threshold_bar_M requires u* < uM < 1");
  }
  const double lower = 1.0 - flux.trapping();
  const double tangent = flux.slope(u_mid);
  if (flux.trapping() == 0.0) return u_mid;
  if (lower * detail::secant(flux, u_mid, 1.0) > tangent) return 1.0;
  auto g = [&](double x) {
    return lower * detail::secant(flux, u_mid, x) - tangent;
  };
  return detail::bisect(g, u_mid, 1.0).value_or(1.0);
}

/// Middle state u~ in (max(u*, uM), uR) at which a backward (lower-curve)
/// shock up to uR travels at the upper-curve characteristic speed f'(u~).
template <ConcaveFlux Flux>
std::optional<double> asymptotic_eta_tilde(const Flux& flux, double u_right,
                                           double u_mid = 0.0) {
  const double eps = flux.trapping();
  const double lo = std::max(flux.maximizer(), u_mid);
  if (eps == 0.0 || !(u_right > lo)) return std::nullopt;
  auto g = [&](double x) {
    return flux.slope(x) - (1.0 - eps) * detail::secant(flux, x, u_right);
  };
  if (!(g(lo) > 0.0)) return std::nullopt;
  return detail::bisect(g, lo, u_right);
}

/// Companion state u- in (uM, min(u*, uR)) at which a forward (upper-curve)
/// shock up to uR travels at the lower-curve speed (1-eps) f'(u-).
template <ConcaveFlux Flux>
std::optional<double> asymptotic_eta_bar(const Flux& flux, double u_right,
                                         double u_mid = 0.0) {
  const double eps = flux.trapping();
  const double hi = std::min(flux.maximizer(), u_right);
  if (eps == 0.0 || !(hi > u_mid)) return std::nullopt;
  auto g = [&](double x) {
    return (1.0 - eps) * flux.slope(x) - detail::secant(flux, x, u_right);
  };
  if (!(g(u_mid) > 0.0) || !(g(hi) < 0.0)) return std::nullopt;
  return detail::bisect(g, u_mid, hi);
}

/// Characteristic speed of a fan value v (rarefaction sides: upper curve
/// above u*, lower curve below).
template <ConcaveFlux Flux>
double fan_speed(const Flux& flux, double v) {
  const double s = flux.slope(v);
  return v > flux.maximizer() ? s : (1.0 - flux.trapping()) * s;
}

/// Middle state that persists when a rarefaction from uL down to uM runs
/// into a shock from uM up to uR: the first fan value above uM at which the
/// fan characteristic stops outrunning the shock. Empty when the shock
/// absorbs the whole fan (or never meets it).
template <ConcaveFlux Flux>
std::optional<double> persistent_middle_state(const Flux& flux, double u_left,
                                              double u_mid, double u_right) {
  if (!(u_mid < u_left && u_mid < u_right)) return std::nullopt;
  auto closing = [&](double v) {
    return fan_speed(flux, v) - shock_speed(flux, v, u_right);
  };
  const double top = std::min(u_left, u_right);
  if (!(closing(u_mid) > kParallelSpeed)) return std::nullopt;
  constexpr int kScan = 2000;
  double prev = u_mid;
  for (int i = 1; i <= kScan; ++i) {
    const double v = u_mid + (top - u_mid) * static_cast<double>(i) / kScan;
    if (v >= u_right) break;
    if (closing(v) <= 0.0) {
      auto root = detail::bisect(closing, prev, v);
      if (root && *root <= u_left) return root;
      return std::nullopt;
    }
    prev = v;
  }
  return std::nullopt;
}

enum class PairCase {
  A,
  B,
  C_interact,
  C_separate,
  a_interact,
  a_separate,
  c_interact,
  c_separate,
  NonApproaching,
};

inline const char* to_string(PairCase c) {
  switch (c) {
    case PairCase::A:
      return "A";
    case PairCase::B:
      return "B";
    case PairCase::C_interact:
      return "C_interact";
    case PairCase::C_separate:
      return "C_separate";
    case PairCase::a_interact:
      return "a_interact";
    case PairCase::a_separate:
      return "a_separate";
    case PairCase::c_interact:
      return "c_interact";
    case PairCase::c_separate:
      return "c_separate";
    case PairCase::NonApproaching:
      return "non_approaching";
  }
  return "?";
}

struct PairClassification {
  PairCase kind = PairCase::NonApproaching;
  /// Speeds of the two facing waves (shock speed, or the facing fan edge /
  /// expansion-shock speed).
  double left_speed = 0.0;
  double right_speed = 0.0;
  /// Separation threshold used for Case C, when applicable.
  std::optional<double> threshold;
  /// Case C interactions whose middle state never disappears.
  std::optional<double> persistent_state;
  /// Mixed-sign speed configurations classified by speed comparison only.
  bool inferred = false;
};

/// How the rarefaction in a pair is represented.
struct Representation {
  std::optional<double> expansion_h;  ///< empty: exact fan

  static Representation exact() { return {}; }
  static Representation expansion(double h) { return {h}; }
};

/// Classify LMR step data: which pair of waves arises and whether they
/// approach.
template <ConcaveFlux Flux>
PairClassification classify_pair(const Flux& flux, double u_left, double u_mid,
                                 double u_right,
                                 Representation rep = Representation::exact()) {
  if (u_mid == u_left || u_mid == u_right) {
    throw std::invalid_argument("classify_pair: uM must differ from uL, uR");
  }
  PairClassification out;
  auto mixed = [](double a, double b) { return a * b < 0.0; };

  if (u_left > u_mid && u_mid > u_right) {
    out.kind = PairCase::NonApproaching;
    if (rep.expansion_h) {
      const auto l = discretize_rarefaction(
          flux, make_fan(flux, u_left, u_mid), *rep.expansion_h);
      const auto r = discretize_rarefaction(
          flux, make_fan(flux, u_mid, u_right), *rep.expansion_h);
      out.left_speed = l.back().speed;
      out.right_speed = r.front().speed;
    } else {
      out.left_speed = make_fan(flux, u_left, u_mid).leading_speed;
      out.right_speed = make_fan(flux, u_mid, u_right).trailing_speed;
    }
    return out;
  }
  if (u_left < u_mid && u_mid < u_right) {
    out.kind = PairCase::B;
    out.left_speed = shock_speed(flux, u_left, u_mid);
    out.right_speed = shock_speed(flux, u_mid, u_right);
    return out;
  }
  if (u_left < u_mid && u_right < u_mid) {
    out.left_speed = shock_speed(flux, u_left, u_mid);
    if (!rep.expansion_h) {
      // The shock always outruns the fan's trailing edge.
      out.kind = PairCase::A;
      out.right_speed = make_fan(flux, u_mid, u_right).trailing_speed;
      return out;
    }
    const auto fronts = discretize_rarefaction(
        flux, make_fan(flux, u_mid, u_right), *rep.expansion_h);
    out.right_speed = fronts.front().speed;
    out.kind = out.left_speed > out.right_speed + kParallelSpeed
                   ? PairCase::a_interact
                   : PairCase::a_separate;
    out.inferred = mixed(out.left_speed, out.right_speed);
    return out;
  }

  // Rarefaction uL -> uM followed by shock uM -> uR.
  out.right_speed = shock_speed(flux, u_mid, u_right);
  if (rep.expansion_h) {
    const auto fronts = discretize_rarefaction(
        flux, make_fan(flux, u_left, u_mid), *rep.expansion_h);
    out.left_speed = fronts.back().speed;
    out.kind = out.left_speed > out.right_speed + kParallelSpeed
                   ? PairCase::c_interact
                   : PairCase::c_separate;
    out.inferred = mixed(out.left_speed, out.right_speed);
    return out;
  }
  out.left_speed = make_fan(flux, u_left, u_mid).leading_speed;
  const double threshold = u_mid <= flux.maximizer()
                               ? threshold_tilde_M(flux, u_mid)
                               : threshold_bar_M(flux, u_mid);
  out.threshold = threshold;
  if (u_right <= threshold + kThresholdSlack) {
    out.kind = PairCase::C_separate;
    return out;
  }
  out.kind = PairCase::C_interact;
  out.persistent_state =
      persistent_middle_state(flux, u_left, u_mid, u_right);
  return out;
}

}  // namespace co2fronts

#endif  // CO2FRONTS_INTERACTIONS_HPP_
