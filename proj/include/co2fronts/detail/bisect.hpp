#ifndef CO2FRONTS_DETAIL_BISECT_HPP_
#define CO2FRONTS_DETAIL_BISECT_HPP_

#include <cmath>
#include <optional>

namespace co2fronts::detail {

/// Root of @p g on [lo, hi] by bisection, given a sign change. Returns
/// nullopt when g(lo) and g(hi) share a strict sign. Stops once the
/// bracket is narrower than @p xtol or after 200 halvings.
template <class G>
std::optional<double> bisect(G&& g, double lo, double hi, double xtol = 1e-14) {
  double glo = g(lo);
  const double ghi = g(hi);
  if (glo == 0.0) return lo;
  if (ghi == 0.0) return hi;
  if ((glo > 0.0) == (ghi > 0.0)) return std::nullopt;
  for (int i = 0; i < 200 && hi - lo > xtol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if (gm == 0.0) return mid;
    if ((gm > 0.0) == (glo > 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace co2fronts::detail

#endif  // CO2FRONTS_DETAIL_BISECT_HPP_
