#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "vinelock/error.hpp"
#include "vinelock/planner.hpp"

using namespace vinelock;

namespace {

constexpr double kPi = std::numbers::pi;

// Small beam so a sharp corner can be rounded tightly: r = 10 gives R_min = 30.
DesignParams small_design() {
  DesignParams d;
  d.beam_radius = 10.0;
  d.max_length = 5000.0;
  return d;
}

Polyline corner_waypoints(double leg) {
  Polyline p;
  for (int i = 0; i <= 100; ++i) p.points.push_back({leg * i / 100.0, 0.0});
  for (int i = 1; i <= 100; ++i) p.points.push_back({leg, leg * i / 100.0});
  return p;
}

// Dense search over line / quarter arc / line chains: radius R and arc start a on a grid,
// the last line sized so the chain is as long as the corner path.
double corner_oracle(const Polyline& wp, double leg, double r_min, std::size_t n) {
  double best = std::numeric_limits<double>::infinity();
  for (double R = r_min; R <= 4 * r_min; R += r_min / 40) {
    for (double a = 0; a <= leg; a += 1.0) {
      const double c = 2 * leg - a - R * kPi / 2;
      if (c < 0) continue;
      const Shape s{Line{a}, Arc{R, kPi / 2, Turn::Left}, Line{c}};
      best = std::min(best, mean_config_error(forward_kinematics(s, Pose{}, 0.5), wp, n));
    }
  }
  return best;
}

Shape random_chain(std::mt19937_64& rng, double r_min) {
  std::uniform_real_distribution<double> len(80, 300), radius(r_min, 3 * r_min), ang(0.4, 1.8);
  std::bernoulli_distribution left(0.5);
  return {Line{len(rng)}, Arc{radius(rng), ang(rng), left(rng) ? Turn::Left : Turn::Right},
          Line{len(rng)}};
}

std::size_t arc_count(const Shape& s) {
  std::size_t n = 0;
  for (const auto& p : s) n += std::holds_alternative<Arc>(p) ? 1 : 0;
  return n;
}

}  // namespace

TEST(FitShape, CollinearIsOneLine) {
  Polyline wp;
  for (int i = 0; i < 20; ++i) wp.points.push_back({3.0 + 10.0 * i * 0.6, -2.0 + 10.0 * i * 0.8});
  const auto fit = fit_shape(wp, DesignParams{}, 5.0);
  ASSERT_EQ(fit.shape.size(), 1u);
  ASSERT_TRUE(std::holds_alternative<Line>(fit.shape[0]));
  EXPECT_NEAR(std::get<Line>(fit.shape[0]).length, 190.0, 1e-6);
  EXPECT_LT(fit.residual, 1e-6);
  EXPECT_EQ(fit.primitive_count, 1u);
  EXPECT_NEAR(fit.base.x, 3.0, 1e-12);
  EXPECT_NEAR(fit.base.y, -2.0, 1e-12);
  EXPECT_NEAR(fit.base.heading, std::atan2(0.8, 0.6), 1e-9);
}

TEST(FitShape, RecoversTwoArcShape) {
  const DesignParams d{};
  const Shape truth{Arc{200, 1.0, Turn::Left}, Arc{300, 0.8, Turn::Right}};
  const Polyline wp = forward_kinematics(truth, Pose{}, 0.1);
  const auto fit = fit_shape(wp, d, 0.1);
  EXPECT_LT(fit.residual, 0.1);
  EXPECT_LE(arc_count(fit.shape), 2u);
  EXPECT_LE(fit.primitive_count, 2u);
}

TEST(FitShape, CornerMatchesBruteForce) {
  const DesignParams d = small_design();
  const double leg = 500.0;
  const Polyline wp = corner_waypoints(leg);
  const auto fit = fit_shape(wp, d, 5.0);
  const std::size_t n = fit_eval_points(wp, FitOptions{});
  const double oracle = corner_oracle(wp, leg, min_bend_radius(d), n);
  EXPECT_LE(fit.residual, 5.0);
  EXPECT_LE(fit.residual, oracle + 0.05);
  EXPECT_LE(fit.primitive_count, 3u);
  for (const auto& p : fit.shape) {
    if (const auto* a = std::get_if<Arc>(&p)) EXPECT_GE(a->radius, min_bend_radius(d) * (1 - 1e-9));
  }
}

TEST(FitShape, PrimitiveCountNonIncreasingInTolerance) {
  const DesignParams d = small_design();
  const Polyline wp = corner_waypoints(400.0);
  std::size_t prev = std::numeric_limits<std::size_t>::max();
  for (double tol : {1.0, 2.0, 5.0, 20.0, 100.0}) {
    const auto fit = fit_shape(wp, d, tol);
    EXPECT_LE(fit.residual, tol);
    EXPECT_LE(fit.primitive_count, prev) << tol;
    prev = fit.primitive_count;
  }
}

TEST(FitShape, RandomThreePrimitiveChains) {
  const DesignParams d{};
  const double r_min = min_bend_radius(d);
  std::mt19937_64 rng(5);
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < 100; ++i) {
    const Shape truth = random_chain(rng, r_min);
    const Polyline wp = forward_kinematics(truth, Pose{}, 0.1);
    const auto fit = fit_shape(wp, d, 1.0);
    EXPECT_LE(fit.residual, 1.0) << i;
    EXPECT_LE(fit.primitive_count, 3u) << i;
  }
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 60.0);
}

TEST(FitShape, UnreachableToleranceReportsBest) {
  // A zig-zag far tighter than any arc this design can bend.
  Polyline wp;
  for (int i = 0; i < 40; ++i) wp.points.push_back({10.0 * i, (i % 2) * 30.0});
  FitOptions opts;
  opts.primitive_budget = 4;
  try {
    fit_shape(wp, DesignParams{}, 0.5, opts);
    FAIL();
  } catch (const UnreachableToleranceError& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnreachableTolerance);
    EXPECT_GT(e.best_residual_mm(), 0.5);
    EXPECT_GE(e.best_primitive_count(), 1u);
    EXPECT_LE(e.best_primitive_count(), 4u);
  }
}

TEST(FitShape, OutputIsPlannable) {
  const DesignParams d = small_design();
  const auto fit = fit_shape(corner_waypoints(500.0), d, 5.0);
  PlanOptions opts;
  opts.base = fit.base;
  const Plan plan = plan_from_shape(fit.shape, d, 7.0, opts);
  const Polyline want = forward_kinematics(fit.shape, fit.base, kDefaultSamplesPerMm);
  EXPECT_LT(mean_config_error(predict(plan, d), want, 200), 1e-6);
}

TEST(FitShape, RejectsDegenerateInput) {
  EXPECT_THROW(fit_shape(Polyline{{{0, 0}}}, DesignParams{}, 1.0), Error);
  EXPECT_THROW(fit_shape(Polyline{{{0, 0}, {0, 0}}}, DesignParams{}, 1.0), Error);
  EXPECT_THROW(fit_shape(Polyline{{{0, 0}, {1, 0}}}, DesignParams{}, 0.0), Error);
}
