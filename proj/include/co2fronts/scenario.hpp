#ifndef CO2FRONTS_SCENARIO_HPP_
#define CO2FRONTS_SCENARIO_HPP_

/// @file scenario.hpp
/// @brief JSON scenario documents: schema and domain validation, and the
/// initial data they describe. Requires nlohmann/json.
///
///   {
///     "model":   {"M": 1, "epsilon": 0.4},
///     "initial": {"pieces": [{"interval": [0, 1], "value": 1.0}],
///                 "left": 0.2, "right": 0.3},
///     "run":     {"mode": "track", "h": 0.01, "T": 60,
///                 "snapshot_times": [0, 5, 60]}
///   }
///
/// Without "pieces", "left"/"right" alone give a step at "x0" (default 0).
/// "initial" may instead hold {"profile": {"name": "gaussian", ...}}.

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "co2fronts/characteristics.hpp"
#include "co2fronts/flux.hpp"
#include "co2fronts/oracle.hpp"
#include "co2fronts/tracker.hpp"

namespace co2fronts {

inline const std::vector<std::string>& scenario_modes() {
  static const std::vector<std::string> modes = {
      "riemann", "interact", "track", "characteristics", "oracle-compare"};
  return modes;
}

/// A named initial profile and its numeric parameters.
struct NamedProfile {
  std::string name;
  std::map<std::string, double> params;
};

struct Scenario {
  FluxParams model;
  std::optional<PiecewiseConstantState> pieces;
  std::optional<NamedProfile> profile;
  std::string mode;
  std::optional<double> h;
  std::optional<double> delta;
  double T = 1.0;
  std::vector<double> snapshot_times;
  std::optional<GridSpec> grid;
  std::optional<CharGrid> chars;
  nlohmann::json source;
};

struct ParseResult {
  std::optional<Scenario> scenario;
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

namespace detail {

inline const std::map<std::string, std::vector<std::string>>& profile_schema() {
  static const std::map<std::string, std::vector<std::string>> schema = {
      {"gaussian", {"base", "amplitude", "center", "width"}},
      {"tent", {"base", "peak", "center", "half_width"}},
      {"box", {"base", "value", "from", "to"}},
  };
  return schema;
}

class Checker {
 public:
  std::vector<std::string> violations;

  void fail(std::string msg) { violations.push_back(std::move(msg)); }

  /// Number at @p key of @p obj; records a violation when absent (if
  /// @p required) or not a number.
  std::optional<double> number(const nlohmann::json& obj, const std::string& key,
                               const std::string& where, bool required = true) {
    if (!obj.is_object() || !obj.contains(key) || obj.at(key).is_null()) {
      if (required) fail(where + " required");
      return std::nullopt;
    }
    const auto& v = obj.at(key);
    if (!v.is_number()) {
      fail(where + " must be a number");
      return std::nullopt;
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
      fail(where + " must be finite");
      return std::nullopt;
    }
    return d;
  }

  std::optional<double> saturation(const nlohmann::json& obj, const std::string& key,
                                   const std::string& where, bool required = true) {
    auto v = number(obj, key, where, required);
    if (v && !(*v >= 0.0 && *v <= 1.0)) {
      fail(where + " = " + std::to_string(*v) + " outside [0,1]");
      return std::nullopt;
    }
    return v;
  }

  std::optional<double> positive(const nlohmann::json& obj, const std::string& key,
                                 const std::string& where, bool required = true) {
    auto v = number(obj, key, where, required);
    if (v && !(*v > 0.0)) {
      fail(where + " must be > 0");
      return std::nullopt;
    }
    return v;
  }
};

inline void check_model(Checker& c, const nlohmann::json& doc, Scenario& s) {
  if (!doc.contains("model") || !doc.at("model").is_object()) {
    c.fail("model required");
    return;
  }
  const auto& m = doc.at("model");
  if (auto M = c.number(m, "M", "model.M")) {
    if (*M < 1.0) {
      c.fail("model.M = " + std::to_string(*M) +
             " violates M >= 1 (the invading phase is the more mobile one)");
    } else {
      s.model.mobility_ratio = *M;
    }
  }
  if (auto e = c.number(m, "epsilon", "model.epsilon")) {
    if (!(*e >= 0.0 && *e <= 1.0)) {
      c.fail("model.epsilon = " + std::to_string(*e) + " outside [0,1]");
    } else {
      s.model.trapping = *e;
    }
  }
}

inline void check_pieces(Checker& c, const nlohmann::json& init, Scenario& s) {
  static const nlohmann::json kNone = nlohmann::json::array();
  const auto& pieces = init.contains("pieces") ? init.at("pieces") : kNone;
  if (!pieces.is_array()) {
    c.fail("initial.pieces must be an array");
    return;
  }
  PiecewiseConstantState state;
  const auto left = c.saturation(init, "left", "initial.left", false);
  const auto right = c.saturation(init, "right", "initial.right", false);
  state.values = {left.value_or(0.0)};
  bool good = true;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const std::string where = "initial.pieces[" + std::to_string(i) + "]";
    const auto& p = pieces[i];
    if (!p.is_object() || !p.contains("interval") || !p.at("interval").is_array() ||
        p.at("interval").size() != 2 || !p.at("interval")[0].is_number() ||
        !p.at("interval")[1].is_number()) {
      c.fail(where + ".interval must be [a, b]");
      good = false;
      continue;
    }
    const double a = p.at("interval")[0].get<double>();
    const double b = p.at("interval")[1].get<double>();
    const auto v = c.saturation(p, "value", where + ".value");
    if (!(a < b)) {
      c.fail(where + ".interval needs a < b");
      good = false;
    }
    if (!state.breakpoints.empty() && a != state.breakpoints.back()) {
      c.fail(where + " does not start where the previous piece ends");
      good = false;
    }
    if (!v) {
      good = false;
      continue;
    }
    if (state.breakpoints.empty() || a != state.breakpoints.back()) {
      state.breakpoints.push_back(a);
      state.values.push_back(*v);
    } else {
      state.values.back() = *v;
    }
    state.breakpoints.push_back(b);
    state.values.push_back(right.value_or(0.0));
  }
  if (pieces.empty()) {
    // A bare step: left | right at x0.
    const auto x0 = c.number(init, "x0", "initial.x0", false);
    state.values = {left.value_or(0.0)};
    if (right && *right != state.values.front()) {
      state.breakpoints = {x0.value_or(0.0)};
      state.values.push_back(*right);
    }
  }
  if (good) {
    state.merge_equal_runs();
    s.pieces = state;
  }
}

inline void check_profile(Checker& c, const nlohmann::json& init, Scenario& s) {
  const auto& p = init.at("profile");
  if (!p.is_object() || !p.contains("name") || !p.at("name").is_string()) {
    c.fail("initial.profile.name required");
    return;
  }
  NamedProfile np;
  np.name = p.at("name").get<std::string>();
  const auto it = profile_schema().find(np.name);
  if (it == profile_schema().end()) {
    c.fail("initial.profile.name '" + np.name + "' is not one of gaussian, tent, box");
    return;
  }
  bool good = true;
  for (const auto& key : it->second) {
    const auto v = c.number(p, key, "initial.profile." + key);
    if (!v) {
      good = false;
      continue;
    }
    np.params[key] = *v;
  }
  if (!good) return;
  auto in_unit = [&](double v, const std::string& what) {
    if (!(v >= 0.0 && v <= 1.0)) {
      c.fail("initial.profile " + what + " = " + std::to_string(v) + " outside [0,1]");
      good = false;
    }
  };
  const auto& q = np.params;
  in_unit(q.at("base"), "base");
  if (np.name == "gaussian") {
    in_unit(q.at("base") + q.at("amplitude"), "base + amplitude");
    if (!(q.at("width") > 0.0)) c.fail("initial.profile.width must be > 0"), good = false;
  } else if (np.name == "tent") {
    in_unit(q.at("peak"), "peak");
    if (!(q.at("half_width") > 0.0)) {
      c.fail("initial.profile.half_width must be > 0");
      good = false;
    }
  } else {
    in_unit(q.at("value"), "value");
    if (!(q.at("from") < q.at("to"))) c.fail("initial.profile needs from < to"), good = false;
  }
  if (good) s.profile = np;
}

inline void check_initial(Checker& c, const nlohmann::json& doc, Scenario& s) {
  if (!doc.contains("initial") || !doc.at("initial").is_object()) {
    c.fail("initial required");
    return;
  }
  const auto& init = doc.at("initial");
  const bool has_pieces =
      init.contains("pieces") || init.contains("left") || init.contains("right");
  const bool has_profile = init.contains("profile");
  if (has_pieces == has_profile) {
    c.fail("initial needs either pieces (with left/right tails) or a profile");
    return;
  }
  if (has_pieces) {
    check_pieces(c, init, s);
  } else {
    check_profile(c, init, s);
  }
}

inline void check_run(Checker& c, const nlohmann::json& doc, Scenario& s) {
  if (!doc.contains("run") || !doc.at("run").is_object()) {
    c.fail("run required");
    c.fail("mode required");
    return;
  }
  const auto& run = doc.at("run");
  if (!run.contains("mode")) {
    c.fail("mode required");
  } else if (!run.at("mode").is_string()) {
    c.fail("run.mode must be a string");
  } else {
    s.mode = run.at("mode").get<std::string>();
    const auto& modes = scenario_modes();
    if (std::find(modes.begin(), modes.end(), s.mode) == modes.end()) {
      c.fail("run.mode '" + s.mode +
             "' is not one of riemann, interact, track, characteristics, oracle-compare");
      s.mode.clear();
    }
  }
  if (auto T = c.positive(run, "T", "run.T", false)) s.T = *T;
  s.h = c.positive(run, "h", "run.h", false);
  s.delta = c.positive(run, "delta", "run.delta", false);
  if (run.contains("snapshot_times")) {
    const auto& ts = run.at("snapshot_times");
    if (!ts.is_array()) {
      c.fail("run.snapshot_times must be an array");
    } else {
      for (const auto& t : ts) {
        if (!t.is_number()) {
          c.fail("run.snapshot_times entries must be numbers");
          continue;
        }
        const double v = t.get<double>();
        if (!(v >= 0.0 && v <= s.T)) {
          c.fail("run.snapshot_times entry " + std::to_string(v) + " outside [0, T]");
          continue;
        }
        s.snapshot_times.push_back(v);
      }
    }
  }
  if (run.contains("grid")) {
    const auto& g = run.at("grid");
    GridSpec spec;
    bool good = g.is_object();
    if (!good) c.fail("run.grid must be an object");
    if (good) {
      auto lo = c.number(g, "x_lo", "run.grid.x_lo");
      auto hi = c.number(g, "x_hi", "run.grid.x_hi");
      auto dx = c.positive(g, "dx", "run.grid.dx");
      auto cfl = c.number(g, "cfl", "run.grid.cfl", false);
      auto pe = c.positive(g, "Pe", "run.grid.Pe", false);
      if (lo && hi && !(*hi > *lo)) c.fail("run.grid needs x_lo < x_hi"), good = false;
      if (cfl && !(*cfl > 0.0 && *cfl <= 1.0)) {
        c.fail("run.grid.cfl must lie in (0, 1]");
        good = false;
      }
      good = good && lo && hi && dx;
      if (good) {
        spec.x_lo = *lo;
        spec.x_hi = *hi;
        spec.dx = *dx;
        if (cfl) spec.cfl = *cfl;
        spec.peclet = pe;
        s.grid = spec;
      }
    }
  }
  if (run.contains("chars")) {
    const auto& g = run.at("chars");
    CharGrid cg;
    cg.t_end = s.T;
    if (!g.is_object()) {
      c.fail("run.chars must be an object");
    } else {
      auto lo = c.number(g, "x_lo", "run.chars.x_lo");
      auto hi = c.number(g, "x_hi", "run.chars.x_hi");
      auto seeds = c.positive(g, "seeds", "run.chars.seeds", false);
      auto dt = c.positive(g, "dt", "run.chars.dt", false);
      auto fdt = c.positive(g, "front_dt", "run.chars.front_dt", false);
      if (lo && hi && !(*hi > *lo)) c.fail("run.chars needs x_lo < x_hi");
      if (lo && hi && *hi > *lo) {
        cg.x_lo = *lo;
        cg.x_hi = *hi;
        if (seeds) cg.seeds = static_cast<int>(*seeds);
        if (dt) cg.dt = *dt;
        if (fdt) cg.front_dt = *fdt;
        s.chars = cg;
      }
    }
  }
}

/// Mode-specific requirements, checked once the parts parsed.
inline void check_mode(Checker& c, Scenario& s) {
  const bool smooth = s.profile && s.profile->name == "gaussian";
  const bool exact_pieces = s.pieces || (s.profile && s.profile->name == "box");
  if (s.mode == "riemann" || s.mode == "interact") {
    const std::size_t want = s.mode == "riemann" ? 1 : 2;
    if (!s.pieces) {
      c.fail(s.mode + " mode needs initial.pieces");
    } else if (s.pieces->breakpoints.size() != want) {
      c.fail(s.mode + " mode needs exactly " + std::to_string(want) + " jump" +
             (want == 1 ? "" : "s") + " in the initial data");
    }
  }
  const bool tracks = s.mode == "interact" || s.mode == "track" ||
                      s.mode == "oracle-compare" ||
                      (s.mode == "characteristics" && !smooth);
  if (tracks && !s.h) c.fail("run.h required for " + s.mode + " mode");
  if (tracks && !exact_pieces && !s.delta) {
    c.fail("run.delta required to sample a " + s.profile->name + " profile");
  }
  if (s.mode == "oracle-compare" && !s.grid) c.fail("run.grid required for oracle-compare mode");
}

}  // namespace detail

/// Schema and domain check of a parsed document; lists every violation.
inline ParseResult parse_scenario(const nlohmann::json& doc) {
  ParseResult out;
  detail::Checker c;
  Scenario s;
  s.source = doc;
  if (!doc.is_object()) {
    c.fail("scenario must be a JSON object");
    out.violations = c.violations;
    return out;
  }
  detail::check_model(c, doc, s);
  detail::check_initial(c, doc, s);
  detail::check_run(c, doc, s);
  if (c.violations.empty()) detail::check_mode(c, s);
  out.violations = c.violations;
  if (out.ok()) out.scenario = std::move(s);
  return out;
}

/// Initial profile as a function with its support window.
struct ProfileFunction {
  std::function<double(double)> fn;
  double lo;
  double hi;
};

inline ProfileFunction profile_function(const NamedProfile& p) {
  const auto& q = p.params;
  if (p.name == "gaussian") {
    auto g = gaussian_profile(q.at("base"), q.at("amplitude"), q.at("center"),
                              q.at("width"));
    return {g.value, g.lo, g.hi};
  }
  if (p.name == "tent") {
    const double base = q.at("base"), peak = q.at("peak"), c = q.at("center"),
                 w = q.at("half_width");
    return {[=](double x) {
              return base + (peak - base) * std::max(0.0, 1.0 - std::abs(x - c) / w);
            },
            c - w, c + w};
  }
  const double base = q.at("base"), v = q.at("value"), a = q.at("from"), b = q.at("to");
  return {[=](double x) { return x >= a && x < b ? v : base; }, a, b};
}

/// The piecewise-constant initial state the tracker starts from.
inline PiecewiseConstantState initial_state(const Scenario& s) {
  if (s.pieces) return approximate_initial(*s.pieces);
  const auto& p = *s.profile;
  if (p.name == "box") {
    const auto& q = p.params;
    return approximate_initial(PiecewiseConstantState{
        {q.at("from"), q.at("to")}, {q.at("base"), q.at("value"), q.at("base")}});
  }
  const auto f = profile_function(p);
  const double pad = *s.delta;
  return approximate_initial(f.fn, *s.delta, f.lo - pad, f.hi + pad);
}

inline SmoothProfile smooth_profile(const Scenario& s) {
  if (!s.profile || s.profile->name != "gaussian") {
    throw std::invalid_argument("smooth_profile: scenario profile is not smooth");
  }
  const auto& q = s.profile->params;
  return gaussian_profile(q.at("base"), q.at("amplitude"), q.at("center"), q.at("width"));
}

}  // namespace co2fronts

#endif  // CO2FRONTS_SCENARIO_HPP_
