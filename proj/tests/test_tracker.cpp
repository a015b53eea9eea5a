#include "co2fronts/tracker.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

namespace co2fronts {
namespace {

const ModelFlux kFlux04({1.0, 0.4});

PiecewiseConstantState box() { return {{0.0, 1.0}, {0.0, 0.6, 0.0}}; }

TEST(ApproximateInitial, PiecewiseBoxUnchanged) {
  const auto s = approximate_initial(box());
  EXPECT_EQ(s.breakpoints, (std::vector<double>{0.0, 1.0}));
  EXPECT_EQ(s.values, (std::vector<double>{0.0, 0.6, 0.0}));
  EXPECT_DOUBLE_EQ(s.total_variation(), 1.2);
}

TEST(ApproximateInitial, SampledBox) {
  auto profile = [](double x) { return x >= 0.0 && x < 1.0 ? 0.6 : 0.0; };
  const auto s = approximate_initial(profile, 0.1, -0.5, 1.5);
  ASSERT_EQ(s.breakpoints.size(), 2u);
  EXPECT_NEAR(s.breakpoints[0], 0.0, 1e-15);
  EXPECT_NEAR(s.breakpoints[1], 1.0, 1e-15);
  EXPECT_EQ(s.values, (std::vector<double>{0.0, 0.6, 0.0}));
}

TEST(ApproximateInitial, SampledTent) {
  auto tent = [](double x) { return 0.5 * std::max(0.0, 1.0 - std::abs(x)); };
  const auto s = approximate_initial(tent, 0.5, -1.5, 1.5);
  // Midpoints -1.25 ... 1.25 give 0, 0.125, 0.375, 0.375, 0.125, 0.
  EXPECT_EQ(s.values, (std::vector<double>{0.0, 0.125, 0.375, 0.125, 0.0}));
  EXPECT_EQ(s.breakpoints, (std::vector<double>{-1.0, -0.5, 0.5, 1.0}));
  EXPECT_DOUBLE_EQ(s.total_variation(), 0.75);
  EXPECT_LE(s.total_variation(), 1.0);
}

TEST(ApproximateInitial, PropertiesUnderRefinement) {
  auto bump = [](double x) { return 0.8 * std::exp(-x * x * 4.0) * (0.6 + 0.4 * std::cos(5 * x)); };
  // TV of the profile by fine differencing.
  double tv = 0.0;
  double prev = bump(-3.0);
  double lo = 1.0, hi = 0.0;
  for (int i = 1; i <= 600000; ++i) {
    const double v = bump(-3.0 + 6.0 * i / 600000.0);
    tv += std::abs(v - prev);
    prev = v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  double last_err = 1e9;
  for (double delta : {0.2, 0.1, 0.05, 0.025, 0.0125}) {
    const auto s = approximate_initial(bump, delta, -3.0, 3.0);
    EXPECT_LE(s.total_variation(), tv + 1e-9);
    EXPECT_GE(s.min_value(), lo - 1e-12);
    EXPECT_LE(s.max_value(), hi + 1e-12);
    double err = 0.0;
    for (int i = 0; i < 60000; ++i) {
      const double x = -3.0 + 6.0 * (i + 0.5) / 60000.0;
      err += std::abs(s(x) - bump(x)) * 6.0 / 60000.0;
    }
    EXPECT_LT(err, last_err);
    last_err = err;
  }
  EXPECT_LT(last_err, 0.01);
}

TEST(ApproximateInitial, ConstantAndErrors) {
  const auto c = approximate_initial([](double) { return 0.4; }, 0.1, 0.0, 1.0);
  EXPECT_TRUE(c.breakpoints.empty());
  EXPECT_EQ(c.values, (std::vector<double>{0.4}));
  EXPECT_EQ(c.total_variation(), 0.0);
  EXPECT_THROW(approximate_initial([](double) { return 0.4; }, 0.1, 1.0, 1.0),
               std::invalid_argument);
  EXPECT_THROW(approximate_initial([](double) { return 1.4; }, 0.1, 0.0, 1.0),
               std::invalid_argument);
  EXPECT_THROW(approximate_initial(PiecewiseConstantState{{0.0}, {0.1, 1.2}}),
               std::invalid_argument);
  EXPECT_THROW(approximate_initial(PiecewiseConstantState{{1.0, 0.0}, {0.1, 0.2, 0.1}}),
               std::invalid_argument);
}

TEST(InitializeFronts, BoxPlume) {
  const auto fronts = initialize_fronts(kFlux04, box(), 0.2);
  ASSERT_EQ(fronts.size(), 4u);
  EXPECT_EQ(fronts[0].kind, FrontKind::AdmissibleShock);
  EXPECT_NEAR(fronts[0].speed, 0.4, 1e-15);
  EXPECT_EQ(fronts[0].regime, Regime::Upper);
  const double speeds[] = {0.0, 0.24, 0.48};
  const Regime regimes[] = {Regime::Stationary, Regime::Lower, Regime::Lower};
  for (int k = 0; k < 3; ++k) {
    const auto& f = fronts[static_cast<std::size_t>(k + 1)];
    EXPECT_EQ(f.kind, FrontKind::ExpansionShock);
    EXPECT_NEAR(f.speed, speeds[k], 1e-14);
    EXPECT_EQ(f.regime, regimes[k]);
    EXPECT_EQ(f.x, 1.0);
  }
  EXPECT_EQ(initialize_fronts(kFlux04, PiecewiseConstantState{{0.0}, {0.1, 0.7}}, 0.1).size(), 1u);
}

TEST(Evolve, TwoShocksMergeOnce) {
  const std::vector<Front> fronts = {make_front(kFlux04, 0.1, 0.2, 0.0),
                                     make_front(kFlux04, 0.2, 1.0, 1.0)};
  const auto trace = evolve(kFlux04, std::span<const Front>(fronts), 5.0);
  ASSERT_EQ(trace.events.size(), 1u);
  const auto& ev = trace.events[0];
  EXPECT_NEAR(ev.t, 1.0 / 0.82, 1e-12);
  EXPECT_EQ(ev.type, EventType::Collision);
  EXPECT_NEAR(ev.tv_before, 0.9, 1e-15);
  EXPECT_NEAR(ev.tv_after, 0.9, 1e-15);
  const auto alive = live_segments(trace, 5.0);
  ASSERT_EQ(alive.size(), 1u);
  EXPECT_NEAR(alive[0].speed, -0.06, 1e-15);
  EXPECT_EQ(alive[0].u_left, 0.1);
  EXPECT_EQ(alive[0].u_right, 1.0);
}

TEST(Evolve, AnnihilationDropsTvByTwiceTheJump) {
  const PiecewiseConstantState s{{0.0, 0.1}, {0.2, 0.5, 0.2}};
  const auto trace = track(kFlux04, s, 0.5, 2.0);
  ASSERT_EQ(trace.events.size(), 1u);
  EXPECT_EQ(trace.events[0].type, EventType::Annihilation);
  EXPECT_NEAR(trace.events[0].t, 0.1 / (0.3 - 0.18), 1e-12);
  EXPECT_NEAR(trace.events[0].tv_before - trace.events[0].tv_after, 0.6, 1e-15);
  const auto end = state_at(trace, 2.0);
  EXPECT_TRUE(end.breakpoints.empty());
  EXPECT_EQ(end.values.front(), 0.2);
}

TEST(Evolve, SeparatingThresholdDataHasNoEvents) {
  // Fan 0.5 -> 0.3 left of a shock 0.3 -> 0.46 travelling at the fan's
  // leading-edge speed 0.24.
  const PiecewiseConstantState s{{0.0, 1.0}, {0.5, 0.3, 0.46}};
  const auto trace = track(kFlux04, s, 0.01, 100.0);
  EXPECT_TRUE(trace.events.empty());
}

TEST(Evolve, DecreasingStaircaseHasNoEvents) {
  const PiecewiseConstantState s{{0.0, 0.5, 1.0}, {0.9, 0.6, 0.3, 0.1}};
  const auto fronts = initialize_fronts(kFlux04, s, 0.05);
  for (const auto& f : fronts) EXPECT_EQ(f.kind, FrontKind::ExpansionShock);
  const auto trace = track(kFlux04, s, 0.05, 50.0);
  EXPECT_TRUE(trace.events.empty());
}

TEST(Evolve, PlumeTerminalShock) {
  const PiecewiseConstantState s{{0.0, 1.0}, {0.2, 1.0, 0.3}};
  const auto trace = track(kFlux04, s, 0.01, 60.0);
  const auto alive = live_segments(trace, 60.0);
  ASSERT_EQ(alive.size(), 1u);
  EXPECT_EQ(alive[0].u_left, 0.2);
  EXPECT_EQ(alive[0].u_right, 0.3);
  EXPECT_NEAR(alive[0].speed, 0.5, 1e-12);
  const auto end = state_at(trace, 60.0);
  EXPECT_EQ(end.values, (std::vector<double>{0.2, 0.3}));
}

TEST(SampleSolution, InitialTimeAndSingleShock) {
  const auto s = approximate_initial(box());
  const auto trace = track(kFlux04, s, 0.05, 1.0);
  const auto at0 = state_at(trace, 0.0);
  EXPECT_EQ(at0.breakpoints, s.breakpoints);
  EXPECT_EQ(at0.values, s.values);

  const std::vector<Front> one = {Front{0.0, 0.3, 0.5, 0.5, FrontKind::AdmissibleShock, Regime::Upper}};
  const auto t1 = evolve(kFlux04, std::span<const Front>(one), 3.0);
  const std::vector<double> xs = {0.9, 1.1};
  const auto v = sample_solution(t1, 2.0, xs);
  EXPECT_EQ(v[0], 0.3);
  EXPECT_EQ(v[1], 0.5);
  EXPECT_THROW(sample_solution(t1, 3.5, xs), std::out_of_range);
  EXPECT_THROW(sample_solution(t1, -0.1, xs), std::out_of_range);
}

PiecewiseConstantState random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> jumps(1, 20);
  const int n = jumps(rng);
  PiecewiseConstantState s;
  s.values = {0.0};
  double x = 0.0;
  for (int i = 0; i < n; ++i) {
    x += 0.05 + unit(rng);
    s.breakpoints.push_back(x);
    s.values.push_back(i + 1 == n ? 0.0 : std::round(unit(rng) * 20.0) / 20.0);
  }
  s.merge_equal_runs();
  return s;
}

TEST(Evolve, RandomTrackingInvariants) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const ModelFlux flux({1.0 + 9.0 * unit(rng), unit(rng)});
    const auto s = random_state(rng);
    const double h = 0.05;
    const auto fronts = initialize_fronts(flux, s, h);
    const auto trace = track(flux, s, h, 20.0);
    ASSERT_LE(trace.events.size(), fronts.size());
    const std::set<double> initial_values(s.values.begin(), s.values.end());
    std::set<double> front_values;
    for (const auto& f : fronts) {
      front_values.insert(f.u_left);
      front_values.insert(f.u_right);
    }
    for (const auto& seg : trace.segments) {
      ASSERT_LE(std::abs(seg.speed), max_abs_slope(flux) + 1e-15);
      ASSERT_TRUE(front_values.count(seg.u_left));
      ASSERT_TRUE(front_values.count(seg.u_right));
      ASSERT_GE(seg.u_left, s.min_value());
      ASSERT_LE(seg.u_left, s.max_value());
    }
    for (std::size_t i = 1; i < trace.events.size(); ++i) {
      ASSERT_GE(trace.events[i].t, trace.events[i - 1].t);
    }
    std::vector<double> times;
    for (int k = 0; k <= 10; ++k) times.push_back(2.0 * k);
    const auto rep = diagnostics(flux, trace, std::span<const double>(times));
    ASSERT_TRUE(rep.tv_non_increasing);
    ASSERT_TRUE(rep.count_non_increasing);
    ASSERT_TRUE(rep.lipschitz_holds) << rep.max_l1_rate << " > " << rep.lipschitz_bound;

    const auto again = track(flux, s, h, 20.0);
    ASSERT_EQ(again.events.size(), trace.events.size());
    for (std::size_t i = 0; i < trace.events.size(); ++i) {
      ASSERT_EQ(again.events[i].t, trace.events[i].t);
      ASSERT_EQ(again.events[i].x, trace.events[i].x);
    }
  }
}

TEST(Diagnostics, CaseBTvUnchanged) {
  const PiecewiseConstantState s{{0.0, 1.0}, {0.1, 0.2, 1.0}};
  const auto trace = track(kFlux04, s, 0.1, 3.0);
  ASSERT_EQ(trace.events.size(), 1u);
  EXPECT_NEAR(trace.series.front().tv, 0.9, 1e-15);
  EXPECT_NEAR(trace.series.back().tv, 0.9, 1e-15);
  EXPECT_EQ(trace.series.front().front_count, 2);
  EXPECT_EQ(trace.series.back().front_count, 1);
}

TEST(Diagnostics, L1ExactOnShiftedStep) {
  const PiecewiseConstantState a{{0.0}, {1.0, 0.0}};
  const PiecewiseConstantState b{{0.25}, {1.0, 0.0}};
  EXPECT_DOUBLE_EQ(l1_distance(a, b), 0.25);
  EXPECT_EQ(l1_distance(a, a), 0.0);
  const PiecewiseConstantState c{{0.0}, {1.0, 0.5}};
  EXPECT_TRUE(std::isinf(l1_distance(a, c)));
}

}  // namespace
}  // namespace co2fronts
