#ifndef CO2FRONTS_RUN_HPP_
#define CO2FRONTS_RUN_HPP_

/// @file run.hpp
/// @brief Executes a validated Scenario and renders its outputs as CSV
/// text. Nothing touches the filesystem here; see write_artifacts.
///
/// Numbers are printed with 17 significant digits so that values read
/// back are bit-identical.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "co2fronts/characteristics.hpp"
#include "co2fronts/interactions.hpp"
#include "co2fronts/oracle.hpp"
#include "co2fronts/riemann.hpp"
#include "co2fronts/scenario.hpp"
#include "co2fronts/tracker.hpp"

namespace co2fronts {

inline constexpr const char* kToolVersion = "0.1.0";

/// Output file name -> contents, plus a summary for the manifest.
struct Artifacts {
  std::map<std::string, std::string> files;
  nlohmann::json result = nlohmann::json::object();
};

namespace io {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string ids(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(v[i]);
  }
  return out;
}

class Csv {
 public:
  explicit Csv(std::initializer_list<const char*> header) {
    bool first = true;
    for (const char* h : header) {
      if (!first) out_ << ',';
      out_ << h;
      first = false;
    }
    out_ << '\n';
  }
  template <class... Cells>
  void row(const Cells&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  static std::string cell(double v) { return num(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  std::ostringstream out_;
};

inline std::string fronts_csv(const Trace& trace) {
  Csv csv{"front_id", "t_start", "t_end", "x_start", "x_end", "u_left", "u_right",
          "kind", "sigma", "speed"};
  for (const auto& s : trace.segments) {
    csv.row(s.id, s.t_start, s.t_end, s.x_start, s.x_end, s.u_left, s.u_right,
            to_string(s.kind), s.sigma, s.speed);
  }
  return csv.str();
}

inline std::string events_csv(const Trace& trace) {
  Csv csv{"t", "x", "type", "in_ids", "out_ids", "tv_before", "tv_after"};
  for (const auto& e : trace.events) {
    csv.row(e.t, e.x, to_string(e.type), ids(e.in_ids), ids(e.out_ids), e.tv_before,
            e.tv_after);
  }
  return csv.str();
}

inline std::string diag_csv(const std::vector<DiagnosticSample>& series) {
  Csv csv{"t", "tv", "front_count", "plume_area", "support_width"};
  for (const auto& d : series) {
    csv.row(d.t, d.tv, d.front_count, d.plume_area, d.support_width);
  }
  return csv.str();
}

/// Append the intervals of @p s at time @p t; tails run to -inf / inf.
inline void snapshot_rows(Csv& csv, double t, const PiecewiseConstantState& s) {
  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    const double lo = i == 0 ? -inf : s.breakpoints[i - 1];
    const double hi = i == s.breakpoints.size() ? inf : s.breakpoints[i];
    csv.row(t, lo, hi, s.values[i]);
  }
}

inline Csv snapshot_csv() { return Csv{"t", "x_lo", "x_hi", "u"}; }

inline void grid_rows(Csv& csv, double t, double x_lo, double dx,
                      const std::vector<double>& u) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = x_lo + dx * static_cast<double>(i);
    csv.row(t, a, a + dx, u[i]);
  }
}

inline std::string chars_csv(const CharField& field) {
  Csv csv{"polyline_id", "family", "t", "x"};
  for (const auto& l : field.lines) {
    for (std::size_t i = 0; i < l.t.size(); ++i) {
      csv.row(l.id, to_string(l.family), l.t[i], l.x[i]);
    }
  }
  return csv.str();
}

}  // namespace io

namespace detail {

inline std::vector<double> output_times(const Scenario& s) {
  std::vector<double> ts = s.snapshot_times;
  if (ts.empty()) ts = {0.0, s.T};
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  return ts;
}

inline nlohmann::json trace_summary(const ModelFlux& flux, const Trace& trace,
                                    const std::vector<double>& times) {
  const auto rep = diagnostics(flux, trace, std::span<const double>(times));
  const auto end = state_at(trace, trace.horizon);
  return {{"events", trace.events.size()},
          {"segments", trace.segments.size()},
          {"final_fronts", live_segments(trace, trace.horizon).size()},
          {"final_values", end.values},
          {"tv_non_increasing", rep.tv_non_increasing},
          {"count_non_increasing", rep.count_non_increasing},
          {"lipschitz_holds", rep.lipschitz_holds},
          {"lipschitz_bound", rep.lipschitz_bound},
          {"max_l1_rate", rep.max_l1_rate}};
}

inline void add_trace_files(Artifacts& a, const ModelFlux& flux, const Trace& trace,
                            const std::vector<double>& times) {
  a.files["fronts.csv"] = io::fronts_csv(trace);
  a.files["events.csv"] = io::events_csv(trace);
  a.files["diag.csv"] = io::diag_csv(trace.series);
  auto snaps = io::snapshot_csv();
  for (double t : times) io::snapshot_rows(snaps, t, state_at(trace, t));
  a.files["snapshots.csv"] = snaps.str();
  a.result["trace"] = trace_summary(flux, trace, times);
}

inline Artifacts run_riemann(const ModelFlux& flux, const Scenario& s) {
  Artifacts a;
  const auto& st = *s.pieces;
  const double x0 = st.breakpoints.front();
  const double ul = st.values[0], ur = st.values[1];
  const auto sol = solve_riemann(flux, ul, ur, x0);
  const auto times = output_times(s);
  io::Csv fronts{"front_id", "t_start", "t_end", "x_start", "x_end", "u_left",
                 "u_right",  "kind",    "sigma", "speed"};
  auto snaps = io::snapshot_csv();
  if (const auto* f = std::get_if<Front>(&sol)) {
    fronts.row(0, 0.0, s.T, x0, x0 + f->speed * s.T, ul, ur, to_string(f->kind),
               sigma_of(f->regime, flux.trapping()), f->speed);
    for (double t : times) {
      io::snapshot_rows(snaps, t, PiecewiseConstantState{{x0 + f->speed * t}, {ul, ur}});
    }
    const auto adm = check_admissibility(flux, *f);
    a.result = {{"wave", "shock"},
                {"speed", f->speed},
                {"regime", to_string(f->regime)},
                {"sigma", sigma_of(f->regime, flux.trapping())},
                {"admissible", adm.admissible},
                {"diagnostic", adm.diagnostic}};
  } else {
    const auto& fan = std::get<RarefactionFan>(sol);
    GridSpec g;
    if (s.grid) {
      g = *s.grid;
    } else {
      g.x_lo = x0 + std::min(-0.5, fan.trailing_speed * s.T - 0.5);
      g.x_hi = x0 + std::max(0.5, fan.leading_speed * s.T + 0.5);
      g.dx = (g.x_hi - g.x_lo) / 400.0;
    }
    const auto n = static_cast<std::size_t>(std::ceil((g.x_hi - g.x_lo) / g.dx - 1e-9));
    for (double t : times) {
      std::vector<double> u(n);
      for (std::size_t i = 0; i < n; ++i) {
        u[i] = sample_riemann(flux, sol, g.x_lo + g.dx * (static_cast<double>(i) + 0.5), t);
      }
      io::grid_rows(snaps, t, g.x_lo, g.dx, u);
    }
    a.result = {{"wave", "rarefaction"},
                {"trailing_speed", fan.trailing_speed},
                {"leading_speed", fan.leading_speed},
                {"kinked", fan.split}};
    if (fan.split && flux.trapping() > 0.0 && flux.trapping() < 1.0 && s.T > 0.0) {
      a.result["slope_jump_closed_form"] = slope_jump(flux, s.T);
      a.result["slope_jump_sampled_fan"] = fan_center_slope_jump(flux, s.T);
    }
  }
  a.files["fronts.csv"] = fronts.str();
  a.files["snapshots.csv"] = snaps.str();
  return a;
}

inline Artifacts run_interact(const ModelFlux& flux, const Scenario& s) {
  const auto& st = *s.pieces;
  const double ul = st.values[0], um = st.values[1], ur = st.values[2];
  const auto times = output_times(s);
  const auto trace = track(flux, st, *s.h, s.T);
  Artifacts a;
  add_trace_files(a, flux, trace, times);
  const auto exact = classify_pair(flux, ul, um, ur, Representation::exact());
  const auto approx = classify_pair(flux, ul, um, ur, Representation::expansion(*s.h));
  a.result["case_exact"] = to_string(exact.kind);
  a.result["case_expansion"] = to_string(approx.kind);
  if (exact.persistent_state) a.result["persistent_state"] = *exact.persistent_state;
  const double x1 = st.breakpoints[0], x2 = st.breakpoints[1];
  std::optional<ShockPath> path;
  if (ul < um && um > ur) {
    path = shock_through_rarefaction(flux, ul, make_fan(flux, um, ur, x2), x1, s.T,
                                     ShockSide::LeftOfFan);
  } else if (ul > um && um < ur) {
    path = shock_through_rarefaction(flux, ur, make_fan(flux, ul, um, x1), x2, s.T,
                                     ShockSide::RightOfFan);
  }
  if (path) {
    io::Csv csv{"t", "y", "speed", "fan_value"};
    for (std::size_t i = 0; i < path->t.size(); ++i) {
      csv.row(path->t[i], path->y[i], path->speed[i], path->fan_value[i]);
    }
    a.files["shock_path.csv"] = csv.str();
    a.result["oracle"] = {{"status", to_string(path->status)},
                          {"final_speed", path->speed.back()}};
    if (path->limit_speed) a.result["oracle"]["limit_speed"] = *path->limit_speed;
    if (path->status == PathStatus::Absorbed) {
      a.result["oracle"]["absorbed_time"] = path->absorbed_time;
    }
  }
  return a;
}

inline Artifacts run_track(const ModelFlux& flux, const Scenario& s) {
  const auto state = initial_state(s);
  const auto trace = track(flux, state, *s.h, s.T);
  Artifacts a;
  add_trace_files(a, flux, trace, output_times(s));
  a.result["initial_jumps"] = state.breakpoints.size();
  a.result["initial_tv"] = state.total_variation();
  return a;
}

inline Artifacts run_characteristics(const ModelFlux& flux, const Scenario& s) {
  Artifacts a;
  if (!(s.profile && s.profile->name == "gaussian")) {
    const auto state = initial_state(s);
    const auto trace = track(flux, state, *s.h, s.T);
    add_trace_files(a, flux, trace, output_times(s));
    CharGrid g = s.chars.value_or(CharGrid{});
    if (!s.chars) {
      const double lo = state.breakpoints.empty() ? -1.0 : state.breakpoints.front() - 1.0;
      const double hi = state.breakpoints.empty() ? 1.0 : state.breakpoints.back() + 1.0;
      g = CharGrid{lo, hi, 41, s.T, s.T / 50.0, s.T / 50.0};
    }
    g.t_end = s.T;
    a.files["chars.csv"] = io::chars_csv(char_field(flux, trace, g));
    return a;
  }
  const auto p = smooth_profile(s);
  const double t_shock = shock_formation_time(flux, p);
  const double t_end = std::min(s.T, t_shock * (1.0 - 1e-6));
  CharGrid g = s.chars.value_or(CharGrid{p.lo, p.hi, 41, t_end, t_end / 50.0, 1.0});
  g.t_end = t_end;
  a.files["chars.csv"] = io::chars_csv(char_field(flux, p, g));
  const double dx = s.grid ? s.grid->dx : (p.hi - p.lo) / 400.0;
  const auto n = static_cast<std::size_t>(std::ceil((p.hi - p.lo) / dx - 1e-9));
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = p.lo + dx * (static_cast<double>(i) + 0.5);
  auto snaps = io::snapshot_csv();
  for (double t : output_times(s)) {
    if (t > t_end) continue;
    io::grid_rows(snaps, t, p.lo, dx, smooth_solve(flux, p, t, xs));
  }
  a.files["snapshots.csv"] = snaps.str();
  a.result["shock_formation_time"] = t_shock;
  const auto& q = s.profile->params;
  const double xbar = q.at("center");
  if (q.at("amplitude") > 0.0 &&
      std::abs(flux.slope(q.at("base") + q.at("amplitude"))) > 1e-12) {
    const auto path = corner_path(flux, p, xbar, t_end);
    io::Csv csv{"t", "gamma", "speed", "value", "ux_minus", "ux_plus"};
    for (std::size_t i = 0; i < path.t.size(); ++i) {
      csv.row(path.t[i], path.gamma[i], path.speed[i], path.value[i], path.ux_minus[i],
              path.ux_plus[i]);
    }
    a.files["corner.csv"] = csv.str();
    a.result["corner"] = {{"c", path.c},
                          {"initial_speed", path.speed.front()},
                          {"shock_formed", path.shock_formed}};
    if (path.t.size() >= 3) a.result["corner"]["richardson_speed"] = corner_initial_speed(path);
  }
  return a;
}

inline Artifacts run_oracle_compare(const ModelFlux& flux, const Scenario& s) {
  const auto state = initial_state(s);
  const auto times = output_times(s);
  const auto trace = track(flux, state, *s.h, s.T);
  Artifacts a;
  add_trace_files(a, flux, trace, times);
  const auto& g = *s.grid;
  const auto sol = fv_solve(flux, state, g, s.T, times);
  auto snaps = io::snapshot_csv();
  io::Csv cmp{"t", "l1"};
  const double hi = g.x_lo + g.dx * static_cast<double>(sol.centers.size());
  for (std::size_t k = 0; k < sol.times.size(); ++k) {
    io::grid_rows(snaps, sol.times[k], g.x_lo, g.dx, sol.values[k]);
    cmp.row(sol.times[k], compare_l1(sol.snapshot(k),
                                     sample_trace(trace, sol.times[k], g.x_lo, hi)));
  }
  a.files["fv_snapshots.csv"] = snaps.str();
  a.files["compare.csv"] = cmp.str();
  a.result["fv"] = {{"steps", sol.steps}, {"dt", sol.dt}, {"sigma_rule", sol.sigma_rule}};
  a.result["l1_at_T"] = compare_l1(sol.snapshot(sol.times.size() - 1),
                                   sample_trace(trace, s.T, g.x_lo, hi));
  return a;
}

}  // namespace detail

/// Execute @p s. Throws on runtime failures; never writes files.
inline Artifacts run_scenario(const Scenario& s) {
  const ModelFlux flux(s.model);
  if (s.mode == "riemann") return detail::run_riemann(flux, s);
  if (s.mode == "interact") return detail::run_interact(flux, s);
  if (s.mode == "track") return detail::run_track(flux, s);
  if (s.mode == "characteristics") return detail::run_characteristics(flux, s);
  if (s.mode == "oracle-compare") return detail::run_oracle_compare(flux, s);
  throw std::invalid_argument("run_scenario: unknown mode '" + s.mode + "'");
}

/// Stable identifier of a run: FNV-1a over the tool version and the
/// canonical config text, as 16 hex digits.
inline std::string run_id(const Scenario& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : std::string(kToolVersion) + '\n' + s.source.dump()) {
    h = (h ^ c) * 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline nlohmann::json manifest(const Scenario& s, const Artifacts& a, double wall_seconds) {
  nlohmann::json files = nlohmann::json::array();
  for (const auto& [name, _] : a.files) files.push_back(name);
  return {{"tool", "co2fronts"},
          {"version", kToolVersion},
          {"run_id", run_id(s)},
          {"mode", s.mode},
          {"config", s.source},
          {"files", files},
          {"result", a.result},
          {"wall_time_s", wall_seconds}};
}

enum class WriteStatus { Ok, Exists, Failed };

/// Write every artifact plus manifest.json into @p dir. The files are
/// staged in a sibling directory and renamed into place, so a failed
/// write leaves no partial output. An existing @p dir is replaced only
/// when @p force is set.
inline WriteStatus write_artifacts(const std::filesystem::path& dir, const Artifacts& a,
                                   const nlohmann::json& manifest_doc, bool force,
                                   std::string* error = nullptr) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (fs::exists(dir, ec) && !force) return WriteStatus::Exists;
  const fs::path parent = dir.has_parent_path() ? dir.parent_path() : fs::path(".");
  fs::create_directories(parent, ec);
  std::random_device rd;
  const fs::path stage =
      parent / (dir.filename().string() + ".partial-" + std::to_string(rd()));
  auto fail = [&](const std::string& msg) {
    if (error) *error = msg;
    fs::remove_all(stage, ec);
    return WriteStatus::Failed;
  };
  if (!fs::create_directory(stage, ec)) return fail("cannot create " + stage.string());
  auto put = [&](const std::string& name, const std::string& body) {
    std::ofstream out(stage / name, std::ios::binary);
    out << body;
    return static_cast<bool>(out);
  };
  for (const auto& [name, body] : a.files) {
    if (!put(name, body)) return fail("cannot write " + name);
  }
  if (!put("manifest.json", manifest_doc.dump(2) + "\n")) return fail("cannot write manifest");
  if (fs::exists(dir, ec)) fs::remove_all(dir, ec);
  fs::rename(stage, dir, ec);
  if (ec) return fail("cannot move output into place: " + ec.message());
  return WriteStatus::Ok;
}

}  // namespace co2fronts

#endif  // CO2FRONTS_RUN_HPP_
