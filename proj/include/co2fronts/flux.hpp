#ifndef CO2FRONTS_FLUX_HPP_
#define CO2FRONTS_FLUX_HPP_

/// @file flux.hpp
/// @brief Two-curve concave flux for the trapping gravity-current model.
///
/// A plume of height u in [0,1] moves with flux sigma*f(u), where sigma
/// is 1 while the plume drains (u decreasing in time) and 1-epsilon while
/// it invades (u increasing in time). Both curves share the maximizer
/// u* and vanish at u = 0 and u = 1.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <stdexcept>
#include <string>
#include <utility>

namespace co2fronts {

/// Saturations within this distance of [0,1] are clamped, not rejected.
inline constexpr double kDomainTolerance = 1e-12;

/// Clamp @p u into [0,1], throwing std::domain_error if it lies further
/// than kDomainTolerance outside.
inline double checked_saturation(double u) {
  if (!(u >= -kDomainTolerance && u <= 1.0 + kDomainTolerance)) {
    throw std::domain_error("saturation " + std::to_string(u) +
                            " outside [0,1]");
  }
  return std::clamp(u, 0.0, 1.0);
}

/// Material pair: mobility ratio M >= 1 and residual trapping fraction
/// epsilon in [0,1].
struct FluxParams {
  double mobility_ratio = 1.0;
  double trapping = 0.0;

  void validate() const {
    if (!(mobility_ratio >= 1.0) || !std::isfinite(mobility_ratio)) {
      throw std::invalid_argument("mobility ratio M must satisfy M >= 1");
    }
    if (!(trapping >= 0.0 && trapping <= 1.0)) {
      throw std::invalid_argument("trapping fraction must lie in [0,1]");
    }
  }
};

/// Which of the two flux curves a wave travels on.
enum class Regime {
  Upper,       ///< sigma = 1, the plume drains behind the wave
  Lower,       ///< sigma = 1 - epsilon, the plume invades
  Stationary,  ///< zero speed, sigma immaterial
};

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::Upper:
      return "upper";
    case Regime::Lower:
      return "lower";
    case Regime::Stationary:
      return "stationary";
  }
  return "?";
}

/// A flux satisfying f(0) = f(1) = 0, f'' < 0 on [0,1], with a trapping
/// fraction selecting the lower curve (1 - epsilon) f.
template <class F>
concept ConcaveFlux = requires(const F& f, double u) {
  { f.value(u) } -> std::convertible_to<double>;
  { f.slope(u) } -> std::convertible_to<double>;
  { f.curvature(u) } -> std::convertible_to<double>;
  { f.maximizer() } -> std::convertible_to<double>;
  { f.trapping() } -> std::convertible_to<double>;
};

/// Fractional flow u(1-u)/(u(M-1)+1) with closed-form derivatives.
class ModelFlux {
 public:
  ModelFlux() : ModelFlux(FluxParams{}) {}
  explicit ModelFlux(FluxParams params) : params_(params) {
    params_.validate();
    maximizer_ = 1.0 / (1.0 + std::sqrt(params_.mobility_ratio));
  }

  const FluxParams& params() const { return params_; }
  double trapping() const { return params_.trapping; }
  double mobility_ratio() const { return params_.mobility_ratio; }

  double value(double u) const {
    u = checked_saturation(u);
    return u * (1.0 - u) / (u * (params_.mobility_ratio - 1.0) + 1.0);
  }

  double slope(double u) const {
    u = checked_saturation(u);
    const double a = params_.mobility_ratio - 1.0;
    const double d = a * u + 1.0;
    return (-a * u * u - 2.0 * u + 1.0) / (d * d);
  }

  // f'' = -2M / ((M-1)u + 1)^3
  double curvature(double u) const {
    u = checked_saturation(u);
    const double d = (params_.mobility_ratio - 1.0) * u + 1.0;
    return -2.0 * params_.mobility_ratio / (d * d * d);
  }

  double maximizer() const { return maximizer_; }

 private:
  FluxParams params_;
  double maximizer_ = 0.5;
};

/// f(u) = u(1-u); the textbook concave flux, kept separate from ModelFlux
/// so generic code is exercised on a second instance.
class QuadraticFlux {
 public:
  explicit QuadraticFlux(double trapping = 0.0) : trapping_(trapping) {
    FluxParams{1.0, trapping}.validate();
  }
  double trapping() const { return trapping_; }
  double value(double u) const {
    u = checked_saturation(u);
    return u * (1.0 - u);
  }
  double slope(double u) const { return 1.0 - 2.0 * checked_saturation(u); }
  double curvature(double u) const {
    checked_saturation(u);
    return -2.0;
  }
  double maximizer() const { return 0.5; }

 private:
  double trapping_;
};

template <ConcaveFlux Flux>
double ustar(const Flux& flux) {
  return flux.maximizer();
}

inline double sigma_of(Regime r, double trapping) {
  return r == Regime::Lower ? 1.0 - trapping : 1.0;
}

/// Characteristic speeds of both families at one saturation.
struct CharSpeeds {
  double faster;
  double slower;
};

template <ConcaveFlux Flux>
CharSpeeds char_speeds(const Flux& flux, double u) {
  const double s = flux.slope(u);
  const double scaled = (1.0 - flux.trapping()) * s;
  return {std::max(s, scaled), std::min(s, scaled)};
}

/// sup |f'| over [0,1]; f' is monotone so the endpoints suffice.
template <ConcaveFlux Flux>
double max_abs_slope(const Flux& flux) {
  return std::max(std::abs(flux.slope(0.0)), std::abs(flux.slope(1.0)));
}

}  // namespace co2fronts

#endif  // CO2FRONTS_FLUX_HPP_
