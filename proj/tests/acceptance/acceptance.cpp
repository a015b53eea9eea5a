// Acceptance checks. Each criterion prints one PASS/FAIL line; the exit
// status is nonzero if any selected criterion fails.
//
//   acceptance                  run every criterion
//   acceptance --criterion N    run criterion N only (1..9)

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "co2fronts/characteristics.hpp"
#include "co2fronts/interactions.hpp"
#include "co2fronts/oracle.hpp"
#include "co2fronts/riemann.hpp"
#include "co2fronts/tracker.hpp"

using namespace co2fronts;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Random Riemann data shared by the first two criteria.
struct RiemannCase {
  double M, eps, ul, ur;
};

std::vector<RiemannCase> random_riemann_cases(std::size_t n) {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> m(1.0, 20.0), unit(0.0, 1.0);
  std::vector<RiemannCase> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back({m(rng), unit(rng), unit(rng), unit(rng)});
  return out;
}

Outcome riemann_structure() {
  const auto cases = random_riemann_cases(10000);
  int shocks = 0, fans = 0, bad_kind = 0, bad_shock = 0, bad_expansion = 0;
  for (const auto& c : cases) {
    const ModelFlux flux({c.M, c.eps});
    const auto sol = solve_riemann(flux, c.ul, c.ur);
    if (const auto* s = std::get_if<Front>(&sol)) {
      ++shocks;
      if (!(c.ul < c.ur) || s->kind != FrontKind::AdmissibleShock) ++bad_kind;
      const auto rep = check_admissibility(flux, *s);
      const double slower_r = char_speeds(flux, c.ur).slower;
      if (!rep.admissible || !rep.right_slower_enters || s->speed < slower_r - kSpeedTolerance) {
        ++bad_shock;
      }
    } else if (const auto* fan = std::get_if<RarefactionFan>(&sol)) {
      ++fans;
      if (!(c.ul > c.ur)) ++bad_kind;
      for (const auto& f : discretize_rarefaction(flux, *fan, 0.05)) {
        const double lo = char_speeds(flux, f.u_left).slower;
        const double hi = char_speeds(flux, f.u_right).slower;
        if (f.kind != FrontKind::ExpansionShock || f.speed < lo - kSpeedTolerance ||
            f.speed > hi + kSpeedTolerance) {
          ++bad_expansion;
        }
      }
    } else if (c.ul != c.ur) {
      ++bad_kind;
    }
  }
  return {bad_kind + bad_shock + bad_expansion == 0,
          fmt("%d shocks, %d fans; kind errors %d, inadmissible shocks %d, expansion "
              "fronts outside slower-speed band %d",
              shocks, fans, bad_kind, bad_shock, bad_expansion)};
}

Outcome sigma_consistency() {
  const auto cases = random_riemann_cases(10000);
  int checked = 0, bad = 0;
  for (const auto& c : cases) {
    if (!(c.ul < c.ur)) continue;
    const ModelFlux flux({c.M, c.eps});
    const Front s = make_front(flux, c.ul, c.ur);
    ++checked;
    if (s.speed > 0.0 && s.regime != Regime::Upper) ++bad;
    if (s.speed < 0.0 && s.regime != Regime::Lower) ++bad;
  }
  // Stationary shocks: uR above u* with f(uR) = f(uL), found by bisection.
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> m(1.0, 20.0), unit(0.0, 1.0);
  int stationary = 0;
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const ModelFlux flux({m(rng), unit(rng)});
    const double star = 1.0 / (1.0 + std::sqrt(flux.mobility_ratio()));
    const double ul = star * (0.05 + 0.9 * unit(rng));
    double lo = star, hi = 1.0;
    for (int k = 0; k < 200; ++k) {
      const double mid = 0.5 * (lo + hi);
      (flux.value(mid) > flux.value(ul) ? lo : hi) = mid;
    }
    const Front s = make_front(flux, ul, 0.5 * (lo + hi));
    ++stationary;
    worst = std::max(worst, std::abs(s.speed));
  }
  const bool pass = bad == 0 && worst <= 1e-12;
  return {pass, fmt("%d shocks, %d sign/regime mismatches; %d stationary pairs, max |speed| %.3g",
                    checked, bad, stationary, worst)};
}

Outcome slope_jump_check() {
  bool pass = true;
  double worst = 0.0;
  std::string sample;
  for (double M : {1.0, 10.0}) {
    for (double eps : {0.4, 0.7}) {
      for (double tau : {0.5, 1.0, 2.0}) {
        const ModelFlux flux({M, eps});
        const auto fan = make_fan(flux, 1.0, 0.0);
        const double star = flux.maximizer();
        // Second-order one-sided differences in x at time tau.
        const double d = 1e-5;
        auto u = [&](double x) { return sample_rarefaction(flux, fan, x / tau); };
        const double right = (-3.0 * star + 4.0 * u(d) - u(2.0 * d)) / (2.0 * d);
        const double left = (3.0 * star - 4.0 * u(-d) + u(-2.0 * d)) / (2.0 * d);
        const double measured = right - left;
        const double target = -std::sqrt(M) / (2.0 * tau * eps);
        const double rel = std::abs(measured - target) / std::abs(target);
        worst = std::max(worst, rel);
        if (rel > 0.01) pass = false;
        if (sample.empty()) {
          sample = fmt("M=%g eps=%g tau=%g: measured %.6f, target %.6f", M, eps, tau, measured,
                       target);
        }
      }
    }
  }
  return {pass, fmt("max relative error %.3g over 12 cases (%s)", worst, sample.c_str())};
}

// The live admissible shock whose left state is u_left, if any.
const FrontSegment* shock_from(const std::vector<FrontSegment>& alive, double u_left) {
  for (const auto& s : alive) {
    if (s.kind == FrontKind::AdmissibleShock && std::abs(s.u_left - u_left) < 1e-12) return &s;
  }
  return nullptr;
}

Outcome plume_through_fan() {
  const ModelFlux flux({1.0, 0.4});
  const double T = 60.0;
  const PiecewiseConstantState init{{0.0, 1.0}, {0.2, 1.0, 0.3}};
  const auto trace = track(flux, init, 0.01, T);
  const auto final_fronts = live_segments(trace, T);
  const bool single = final_fronts.size() == 1;
  const double speed = single ? final_fronts[0].speed : NAN;

  const auto path = shock_through_rarefaction(flux, 0.2, make_fan(flux, 1.0, 0.3, 1.0), 0.0, T,
                                              ShockSide::LeftOfFan);
  const double graze = 0.6 * flux.slope(0.2);
  bool crosses = false;
  for (std::size_t i = 1; i < path.speed.size(); ++i) {
    if (path.speed[i - 1] < graze && path.speed[i] >= graze) crosses = true;
  }
  double sup = 0.0;
  bool tracked = true;
  for (int k = 0; k <= 6000; ++k) {
    const double t = T * k / 6000.0;
    const auto alive = live_segments(trace, t);
    const auto* s = shock_from(alive, 0.2);
    if (!s) {
      tracked = false;
      break;
    }
    sup = std::max(sup, std::abs(s->position(t) - path.position(t)));
  }
  const bool pass = single && std::abs(speed - 0.5) <= 0.02 && crosses && tracked && sup <= 0.02;
  return {pass, fmt("final fronts %zu, speed %.6f; oracle speed crosses %.2f: %s; sup |x_track - "
                    "x_oracle| = %.4g",
                    final_fronts.size(), speed, graze, crosses ? "yes" : "no",
                    tracked ? sup : NAN)};
}

Outcome middle_state() {
  const ModelFlux flux({1.0, 0.7});
  const double eps = 0.7, ur = 0.9;
  // Independent root of f'(x) = (1 - eps)(f(uR) - f(x))/(uR - x) for f = u(1-u).
  auto g = [&](double x) {
    const double f = [](double u) { return u * (1.0 - u); }(x);
    return (1.0 - 2.0 * x) - (1.0 - eps) * (ur * (1.0 - ur) - f) / (ur - x);
  };
  double lo = 0.5, hi = ur - 1e-12;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  const double oracle = 0.5 * (lo + hi);
  const auto eta = asymptotic_eta_tilde(flux, ur, 0.0);
  const bool eta_ok = eta && std::abs(*eta - oracle) <= 1e-6 && std::abs(*eta - 0.570588) <= 1e-6;
  const double limit = flux.slope(oracle);

  const double T = 50.0;
  const auto persistent = track(flux, PiecewiseConstantState{{0.0, 1.0}, {0.7, 0.0, 0.9}}, 0.01, T);
  const auto alive = live_segments(persistent, T);
  const auto& right = alive.back();
  const bool right_ok = std::abs(right.u_right - ur) < 1e-12 && std::abs(right.speed - limit) <= 0.02;
  // The fan above the shock's left state survives: more than one front and
  // the shock's left state is still below uL.
  const bool persists = alive.size() > 1 && right.u_left < 0.7 - 1e-9;

  const auto merged = track(flux, PiecewiseConstantState{{0.0, 1.0}, {0.51, 0.0, 0.9}}, 0.01, T);
  const auto last = live_segments(merged, T);
  const bool single = last.size() == 1 && std::abs(last[0].speed + 0.1230) <= 0.002;

  return {eta_ok && right_ok && persists && single,
          fmt("eta~ %.9f (oracle %.9f); uL=0.7: right shock speed %.5f vs %.5f, %zu fronts, "
              "left state %.3f; uL=0.51: %zu front(s), speed %.5f",
              eta ? *eta : NAN, oracle, right.speed, limit, alive.size(), right.u_left,
              last.size(), last.empty() ? NAN : last[0].speed)};
}

// L1 distance on [a, b] between the tracker state and an exact solution,
// integrating the exact profile on a fine subdivision of each constant piece.
double l1_against(const PiecewiseConstantState& s, const std::function<double(double)>& exact,
                  double a, double b) {
  std::vector<double> cuts{a};
  for (double x : s.breakpoints) {
    if (x > a && x < b) cuts.push_back(x);
  }
  cuts.push_back(b);
  double sum = 0.0;
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    const double x0 = cuts[i - 1], x1 = cuts[i];
    const double c = s(0.5 * (x0 + x1));
    const int n = std::max(8, static_cast<int>(std::ceil((x1 - x0) * 20000.0)));
    const double dx = (x1 - x0) / n;
    for (int k = 0; k < n; ++k) sum += std::abs(exact(x0 + (k + 0.5) * dx) - c) * dx;
  }
  return sum;
}

Outcome convergence() {
  const ModelFlux flux({1.0, 0.4});
  const std::vector<double> hs{0.1, 0.05, 0.025, 0.0125};
  std::string detail;
  auto errors = [&](double ul, double ur) {
    const auto exact_sol = solve_riemann(flux, ul, ur);
    std::vector<double> e;
    for (double h : hs) {
      const auto trace = track(flux, PiecewiseConstantState{{0.0}, {ul, ur}}, h, 1.0);
      e.push_back(l1_against(state_at(trace, 1.0),
                             [&](double x) { return sample_riemann(flux, exact_sol, x, 1.0); },
                             -2.0, 2.0));
    }
    return e;
  };
  auto order = [&](const std::vector<double>& e) {
    // Least-squares slope of log e against log h.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
      const double x = std::log(hs[i]), y = std::log(e[i]);
      sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  const auto shock = errors(0.2, 0.8);
  const auto fan = errors(0.8, 0.2);
  const double shock_max = *std::max_element(shock.begin(), shock.end());
  // A single shock is tracked exactly; zero error satisfies any order.
  const bool shock_ok = shock_max <= 1e-12 || order(shock) >= 0.9;
  const double p = order(fan);
  bool decreasing = true;
  for (std::size_t i = 1; i < fan.size(); ++i) decreasing = decreasing && fan[i] < fan[i - 1];
  return {shock_ok && decreasing && p >= 0.9,
          fmt("shock max error %.3g; rarefaction errors %.4g %.4g %.4g %.4g, order %.3f",
              shock_max, fan[0], fan[1], fan[2], fan[3], p)};
}

Outcome invariants() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0), m(1.0, 20.0), hd(0.02, 0.2);
  std::uniform_int_distribution<int> jumps(1, 20);
  int failures = 0, events = 0;
  double worst_rate = 0.0;
  std::string first;
  for (int trial = 0; trial < 100; ++trial) {
    const ModelFlux flux({m(rng), unit(rng)});
    const int n = jumps(rng);
    PiecewiseConstantState s;
    s.breakpoints.clear();
    s.values = {unit(rng)};
    double x = -1.0;
    for (int i = 0; i < n; ++i) {
      x += 0.05 + 0.2 * unit(rng);
      s.breakpoints.push_back(x);
      s.values.push_back(unit(rng));
    }
    const double T = 2.0;
    const auto trace = track(flux, s, hd(rng), T);
    std::vector<double> times;
    for (int k = 0; k <= 10; ++k) times.push_back(T * k / 10.0);
    const auto rep = diagnostics(flux, trace, times);
    const double fmax = max_abs_slope(flux);
    bool speeds_ok = true;
    for (const auto& seg : trace.segments) {
      if (std::abs(seg.speed) > fmax * (1.0 + 1e-12)) speeds_ok = false;
    }
    events += static_cast<int>(trace.events.size());
    if (rep.lipschitz_bound > 0) worst_rate = std::max(worst_rate, rep.max_l1_rate / rep.lipschitz_bound);
    if (!(rep.tv_non_increasing && rep.count_non_increasing && rep.lipschitz_holds && speeds_ok)) {
      if (first.empty()) first = fmt(" (first failure: trial %d)", trial);
      ++failures;
    }
  }
  return {failures == 0, fmt("100 trials, %d events, %d failures; max L1 rate / bound %.3f%s",
                             events, failures, worst_rate, first.c_str())};
}

Outcome corner() {
  struct Case {
    double M, eps, a, b, w;
  };
  bool pass = true;
  std::string detail;
  for (const Case& k : {Case{1.0, 0.4, 0.3, 1.0, 0.3}, Case{4.0, 0.7, 0.2, 0.5, 0.3},
                        Case{10.0, 0.5, 0.6, 1.0, 0.3}}) {
    const ModelFlux flux({k.M, k.eps});
    SmoothProfile p;
    p.value = [=](double x) { return k.a - k.b * x * x; };
    p.derivative = [=](double x) { return -2.0 * k.b * x; };
    p.lo = -k.w;
    p.hi = k.w;
    const auto path = corner_path(flux, p, 0.0, 0.5);
    const double estimate = corner_initial_speed(path);
    const double target = (1.0 - 0.5 * k.eps) * flux.slope(k.a);
    const double rel = std::abs(estimate - target) / std::abs(target);
    // Bracket by the characteristic speeds of the state at the corner.
    bool bracketed = !path.shock_formed;
    for (std::size_t i = 0; i < path.t.size(); ++i) {
      const auto cs = char_speeds(flux, path.value[i]);
      if (path.speed[i] < cs.slower - 1e-12 || path.speed[i] > cs.faster + 1e-12) bracketed = false;
    }
    pass = pass && rel <= 0.01 && bracketed;
    detail += fmt("%s(M=%g,eps=%g) rel %.2g%s", detail.empty() ? "" : "; ", k.M, k.eps, rel,
                  bracketed ? "" : " NOT bracketed");
  }
  return {pass, detail};
}

Outcome cross_check() {
  const ModelFlux flux({1.0, 0.4});
  const PiecewiseConstantState box{{0.0, 1.0}, {0.0, 0.6, 0.0}};
  std::vector<double> d;
  for (int k : {4, 2, 1}) {
    const double h = 0.005 * k, dx = k / 2000.0;
    GridSpec spec;
    spec.x_lo = -1.0;
    spec.x_hi = 2.5;
    spec.dx = dx;
    const auto trace = track(flux, box, h, 1.0);
    const auto sol = fv_solve(flux, box, spec, 1.0);
    d.push_back(compare_l1(sol.snapshot(0), sample_trace(trace, 1.0, spec.x_lo, spec.x_hi)));
  }
  const bool decreasing = d[1] < d[0] && d[2] < d[1];
  return {decreasing && d[2] <= 0.05,
          fmt("L1 at (dx, h) = (1/500, 0.02) %.4g, (1/1000, 0.01) %.4g, (1/2000, 0.005) %.4g",
              d[0], d[1], d[2])};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion")->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> all{
      {1, "Riemann structure", 5.0, riemann_structure},
      {2, "sigma/speed consistency", 5.0, sigma_consistency},
      {3, "Rarefaction slope jump", 1.0, slope_jump_check},
      {4, "Plume shock through a fan", 10.0, plume_through_fan},
      {5, "Persistent middle state", 30.0, middle_state},
      {6, "Convergence", 30.0, convergence},
      {7, "Tracking invariants", 60.0, invariants},
      {8, "Corner ODE", 5.0, corner},
      {9, "Oracle cross-check", 60.0, cross_check},
  };
  int failed = 0;
  for (const auto& c : all) {
    if (only != 0 && c.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = o.pass && in_time;
    std::printf("%s [%d] %s: %s (%.2f s of %.0f s%s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs, c.budget_s, in_time ? "" : ", over budget");
    if (!pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
