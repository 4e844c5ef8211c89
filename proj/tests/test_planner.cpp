#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "vinelock/error.hpp"
#include "vinelock/planner.hpp"
#include "vinelock/statics.hpp"

using namespace vinelock;

namespace {

constexpr double kPi = std::numbers::pi;

const DesignParams kDesign{};
const double kRmin = 162.0;

std::vector<SetTension> tensions_of(const Plan& p) {
  std::vector<SetTension> out;
  for (const auto& c : p.steps) {
    if (const auto* t = std::get_if<SetTension>(&c)) out.push_back(*t);
  }
  return out;
}

std::vector<double> grows_of(const Plan& p) {
  std::vector<double> out;
  for (const auto& c : p.steps) {
    if (const auto* g = std::get_if<Grow>(&c)) out.push_back(g->delta_len);
  }
  return out;
}

double max_pointwise(const Polyline& a, const Polyline& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    worst = std::max(worst, std::hypot(a.points[i].x - b.points[i].x, a.points[i].y - b.points[i].y));
  }
  return worst;
}

// Line, arc, line with the last primitive at least one window long.
Shape random_shape(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> len(10, 400), radius(kRmin, 3 * kRmin), ang(0.1, 2.5),
      tail(kDesign.leg_len, 400);
  std::bernoulli_distribution left(0.5);
  Shape s;
  s.emplace_back(Line{len(rng)});
  s.emplace_back(Arc{radius(rng), ang(rng), left(rng) ? Turn::Left : Turn::Right});
  s.emplace_back(Line{tail(rng)});
  return s;
}

}  // namespace

TEST(PlanFromShape, LineQuarterTurnLine) {
  const Shape shape{Line{300}, Arc{kRmin, kPi / 2, Turn::Left}, Line{200}};
  const Plan plan = plan_from_shape(shape, kDesign, 7.0);

  const auto t = tensions_of(plan);
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t[0].side, TensionSide::None);
  EXPECT_EQ(t[0].tension, 0.0);
  EXPECT_EQ(t[1].side, TensionSide::Left);
  EXPECT_DOUBLE_EQ(t[1].tension, 10.0);
  EXPECT_EQ(t[2].side, TensionSide::None);

  // Each tension change waits one window length past its primitive's start.
  const double arc_material = (kRmin + 54.0) * kPi / 2;
  const auto g = grows_of(plan);
  ASSERT_EQ(g.size(), 2u);
  EXPECT_NEAR(g[0], 500.0, 1e-9);
  EXPECT_NEAR(g[1], arc_material, 1e-9);
  EXPECT_NEAR(arc_material, 339.29, 5e-3);
  EXPECT_NEAR(plan.total_growth, 300 + arc_material + 200, 1e-9);
  EXPECT_EQ(plan.pressure, 7.0);
}

TEST(PlanFromShape, ClosesOnTheTarget) {
  const Shape shape{Line{300}, Arc{kRmin, kPi / 2, Turn::Left}, Line{200}};
  const Plan plan = plan_from_shape(shape, kDesign, 7.0);
  const Polyline want = forward_kinematics(shape, Pose{}, kDefaultSamplesPerMm);
  const Polyline got = predict(plan, kDesign);
  ASSERT_EQ(got.points.size(), want.points.size());
  EXPECT_LT(max_pointwise(got, want), 1e-6);
  EXPECT_LT(mean_config_error(got, want, 200), 1e-6);
}

TEST(PlanFromShape, ClosureOnRandomShapes) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 100; ++i) {
    const Shape shape = random_shape(rng);
    const Plan plan = plan_from_shape(shape, kDesign, 1.0);
    EXPECT_TRUE(plan.warnings.empty() ||
                plan.warnings.front().kind == PlanWarning::Kind::SeparationRisk);
    const Polyline want = forward_kinematics(shape, Pose{}, kDefaultSamplesPerMm);
    const Polyline got = predict(plan, kDesign);
    EXPECT_LT(mean_config_error(got, want, 200), 1e-6) << i;
    EXPECT_NEAR(plan.total_growth, material_length(shape, kDesign.beam_radius), 1e-9);
  }
}

TEST(PlanFromShape, ClosureWithBaseAndRightTurns) {
  const Shape shape{Arc{200, 1.0, Turn::Right}, Line{50}, Arc{kRmin, 0.7, Turn::Left}, Line{250}};
  PlanOptions opts;
  opts.base = {12, -30, 0.4};
  const Plan plan = plan_from_shape(shape, kDesign, 1.0, opts);
  const Polyline want = forward_kinematics(shape, opts.base, kDefaultSamplesPerMm);
  EXPECT_LT(mean_config_error(predict(plan, kDesign), want, 300), 1e-6);
  EXPECT_LT(std::abs(plan.base.heading - 0.4), 1e-15);
}

TEST(PlanFromShape, ProportionalTensionLaw) {
  const Shape shape{Arc{2 * kRmin, 0.5, Turn::Right}, Line{200}};
  const auto t = tensions_of(plan_from_shape(shape, kDesign, 7.0));
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0].side, TensionSide::Right);
  EXPECT_NEAR(t[0].tension, 5.0, 1e-12);
}

TEST(PlanFromShape, TooTightArcNamesPrimitive) {
  const Shape shape{Line{100}, Line{50}, Arc{kRmin / 2, 0.5, Turn::Left}, Line{200}};
  try {
    plan_from_shape(shape, kDesign, 7.0);
    FAIL();
  } catch (const InfeasibleCurvatureError& e) {
    EXPECT_EQ(e.code(), ErrorCode::InfeasibleCurvature);
    EXPECT_EQ(e.primitive_index(), 2u);
  }
}

TEST(PlanFromShape, EmptyShape) {
  const Plan plan = plan_from_shape({}, kDesign, 7.0);
  EXPECT_TRUE(plan.steps.empty());
  EXPECT_EQ(plan.total_growth, 0.0);
  const Polyline p = predict(plan, kDesign);
  ASSERT_EQ(p.points.size(), 1u);
  EXPECT_EQ(p.points[0], (Point2{0, 0}));
}

TEST(PlanFromShape, BinaryModeSnapsOrRejects) {
  PlanOptions binary;
  binary.mode = TensionMode::Binary;
  const Shape near{Line{100}, Arc{kRmin * 1.005, 1.0, Turn::Left}, Line{200}};
  const Plan plan = plan_from_shape(near, kDesign, 1.0, binary);
  const auto t = tensions_of(plan);
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t[1].tension, 10.0);
  EXPECT_NEAR(std::get<Arc>(plan.predicted_shape[1]).radius, kRmin, 1e-9);

  const Shape far{Line{100}, Arc{kRmin * 1.2, 1.0, Turn::Left}, Line{200}};
  try {
    plan_from_shape(far, kDesign, 1.0, binary);
    FAIL();
  } catch (const InfeasibleCurvatureError& e) {
    EXPECT_EQ(e.primitive_index(), 1u);
  }
  EXPECT_NO_THROW(plan_from_shape(far, kDesign, 1.0));
}

TEST(PlanFromShape, LengthBudget) {
  const Shape shape{Line{2000}, Line{400}};
  try {
    plan_from_shape(shape, kDesign, 7.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LengthBudget);
  }
  EXPECT_NO_THROW(plan_from_shape(Shape{Line{2300}}, kDesign, 7.0));
}

TEST(PlanFromShape, SeparationWarningsPerArc) {
  const Shape shape{Line{100}, Arc{kRmin, 1.5, Turn::Left}, Line{50}, Arc{kRmin, 0.3, Turn::Right},
                    Line{200}};
  const double p_big = separation_pressure(1.5, kDesign.beam_radius, kDesign.fastener);
  const double p_small = separation_pressure(0.3, kDesign.beam_radius, kDesign.fastener);
  ASSERT_LT(p_big, p_small);

  // Between the two thresholds only the larger bend is at risk.
  const Plan mid = plan_from_shape(shape, kDesign, 0.5 * (p_big + p_small));
  ASSERT_EQ(mid.warnings.size(), 1u);
  EXPECT_EQ(mid.warnings[0].kind, PlanWarning::Kind::SeparationRisk);
  EXPECT_EQ(mid.warnings[0].primitive_index, 1u);
  EXPECT_NEAR(mid.warnings[0].p_min_kpa, p_big, 1e-12);

  EXPECT_EQ(plan_from_shape(shape, kDesign, 1.1 * p_small).warnings.size(), 2u);
  EXPECT_TRUE(plan_from_shape(shape, kDesign, 0.9 * p_big).warnings.empty());
}

TEST(PlanFromShape, ShortTailIsFlagged) {
  const Shape shape{Line{300}, Arc{kRmin, kPi / 2, Turn::Left}, Line{50}};
  const Plan plan = plan_from_shape(shape, kDesign, 1.0);
  bool flagged = false;
  for (const auto& w : plan.warnings) {
    if (w.kind == PlanWarning::Kind::UnrealizableTail) {
      flagged = true;
      EXPECT_EQ(w.primitive_index, 2u);
    }
  }
  EXPECT_TRUE(flagged);
  // The predicted shape is what the session actually builds, so prediction matches it.
  const Polyline got = predict(plan, kDesign);
  const Polyline want = forward_kinematics(plan.predicted_shape, Pose{}, kDefaultSamplesPerMm);
  EXPECT_LT(mean_config_error(got, want, 200), 1e-6);
  EXPECT_GT(mean_config_error(got, forward_kinematics(shape, Pose{}, kDefaultSamplesPerMm), 200), 1.0);
}

TEST(PlanFromShape, RejectsBadInputs) {
  EXPECT_THROW(plan_from_shape(Shape{Line{100}}, kDesign, 0.0), Error);
  EXPECT_THROW(plan_from_shape(Shape{Line{-1}}, kDesign, 7.0), Error);
  DesignParams bad = kDesign;
  bad.beam_radius = -3;
  EXPECT_THROW(plan_from_shape(Shape{Line{100}}, bad, 7.0), Error);
}

TEST(Rollout, DisturbanceOnlyWhenAsked) {
  const Shape shape{Line{300}, Arc{kRmin, 1.0, Turn::Left}, Line{200}, Arc{kRmin, 1.0, Turn::Right},
                    Line{300}};
  const Plan plan = plan_from_shape(shape, kDesign, 7.0);
  const auto quiet = rollout(plan, kDesign);
  const auto noisy = rollout(plan, kDesign, {true});
  EXPECT_NEAR(quiet.everted_len, noisy.everted_len, 1e-9);
  const auto a = snapshot(quiet, Pose{}).centerline;
  const auto b = snapshot(noisy, Pose{}).centerline;
  EXPECT_GT(mean_config_error(a, b, 200), 0.0);
}
