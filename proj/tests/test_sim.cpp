#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "vinelock/error.hpp"
#include "vinelock/sim.hpp"

using namespace vinelock;

namespace {

constexpr double kPi = std::numbers::pi;

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no vinelock::Error thrown";
  return ErrorCode::Io;
}

VineState fresh(double pressure = 7.0, bool disturbance = false) {
  return new_session(DesignParams{}, pressure, {disturbance});
}

void run(VineState& s, std::initializer_list<Command> cmds) {
  for (const auto& c : cmds) apply_in_place(s, c);
}

bool same_shape(const Shape& a, const Shape& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].index() != b[i].index()) return false;
    if (const auto* l = std::get_if<Line>(&a[i])) {
      if (l->length != std::get<Line>(b[i]).length) return false;
    } else {
      const auto& x = std::get<Arc>(a[i]);
      const auto& y = std::get<Arc>(b[i]);
      if (x.radius != y.radius || x.angle != y.angle || x.turn != y.turn) return false;
    }
  }
  return true;
}

}  // namespace

TEST(NewSession, ZeroState) {
  const auto s = fresh();
  EXPECT_EQ(s.everted_len, 0.0);
  EXPECT_TRUE(s.locked.empty());
  EXPECT_EQ(s.tension.newtons, 0.0);
  EXPECT_TRUE(s.events.empty());
  EXPECT_FALSE(s.finished);
}

TEST(NewSession, Rejections) {
  DesignParams d;
  d.leg_len = d.max_length;
  EXPECT_EQ(code_of([&] { new_session(d, 7.0); }), ErrorCode::InvalidDesign);
  d = DesignParams{};
  d.stoppers.gap_len = 0;
  EXPECT_EQ(code_of([&] { new_session(d, 7.0); }), ErrorCode::InvalidDesign);
  d = DesignParams{};
  d.stiffness.k_locked = 100;
  EXPECT_EQ(code_of([&] { new_session(d, 7.0); }), ErrorCode::InvalidDesign);
  EXPECT_EQ(code_of([] { new_session(DesignParams{}, -1.0); }), ErrorCode::Precondition);
}

TEST(Apply, StraightGrowthFillsWindowThenLocks) {
  auto s = fresh();
  apply_in_place(s, Grow{500});
  ASSERT_EQ(s.locked.size(), 1u);
  EXPECT_DOUBLE_EQ(std::get<Line>(s.locked[0]).length, 300.0);
  EXPECT_EQ(s.unlocked_len, 200.0);
  EXPECT_EQ(s.unlocked_curvature, 0.0);
  EXPECT_EQ(s.everted_len, 500.0);
}

TEST(Apply, ShortGrowthStaysInWindow) {
  auto s = fresh();
  apply_in_place(s, Grow{120});
  EXPECT_TRUE(s.locked.empty());
  EXPECT_EQ(s.unlocked_len, 120.0);
  apply_in_place(s, Grow{80});
  EXPECT_TRUE(s.locked.empty());
  apply_in_place(s, Grow{1});
  ASSERT_EQ(s.locked.size(), 1u);
  EXPECT_DOUBLE_EQ(std::get<Line>(s.locked[0]).length, 1.0);
}

TEST(Apply, FullTensionGrowthLocksMinimumRadiusQuarterTurn) {
  auto s = fresh();
  const double r = s.design.beam_radius;
  const double rmin = min_bend_radius(s.design);
  run(s, {Grow{500}, SetTension{TensionSide::Left, s.design.stiffness.t_full},
          Grow{(rmin + r) * kPi / 2}});
  ASSERT_EQ(s.locked.size(), 2u);
  const auto& arc = std::get<Arc>(s.locked[1]);
  EXPECT_DOUBLE_EQ(arc.radius, 162.0);
  EXPECT_NEAR(arc.angle, kPi / 2, 1e-12);
  EXPECT_EQ(arc.turn, Turn::Left);
  // The window holds the remaining leg of material at the same curvature.
  const auto w = window_primitive(s);
  ASSERT_TRUE(w.has_value());
  EXPECT_NEAR(std::get<Arc>(*w).angle, 200.0 / (162.0 + 54.0), 1e-12);
}

TEST(Apply, TensionLawIsLinearAndCapped) {
  auto s = fresh();
  const double rmin = min_bend_radius(s.design);
  apply_in_place(s, SetTension{TensionSide::Right, 5.0});
  EXPECT_DOUBLE_EQ(s.unlocked_curvature, -0.5 / rmin);
  const auto ev = apply_in_place(s, SetTension{TensionSide::Left, 25.0});
  ASSERT_EQ(ev.size(), 1u);
  const auto& cap = std::get<TensionCapped>(ev[0].kind);
  EXPECT_EQ(cap.requested, 25.0);
  EXPECT_EQ(cap.applied, 10.0);
  EXPECT_DOUBLE_EQ(s.unlocked_curvature, 1.0 / rmin);
  apply_in_place(s, SetTension{TensionSide::None, 3.0});
  EXPECT_EQ(s.unlocked_curvature, 0.0);
  EXPECT_EQ(s.tension.newtons, 0.0);
}

TEST(Apply, TruncatesAtMaxLengthThenFinishes) {
  auto s = fresh();
  apply_in_place(s, Grow{2000});
  const auto ev = apply_in_place(s, Grow{500});
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_TRUE(std::holds_alternative<MaxLengthReached>(ev[0].kind));
  EXPECT_EQ(ev[0].at_len, 2300.0);
  EXPECT_EQ(s.everted_len, 2300.0);
  EXPECT_TRUE(s.finished);
  EXPECT_EQ(code_of([&] { apply_in_place(s, Grow{1}); }), ErrorCode::SessionFinished);
  EXPECT_EQ(code_of([&] { apply_in_place(s, SetPressure{5}); }), ErrorCode::SessionFinished);
}

TEST(Apply, ExactFitDoesNotFinish) {
  auto s = fresh();
  const auto ev = apply_in_place(s, Grow{2300});
  EXPECT_TRUE(ev.empty());
  EXPECT_FALSE(s.finished);
}

TEST(Apply, RejectsInvalidCommands) {
  auto s = fresh();
  EXPECT_EQ(code_of([&] { apply_in_place(s, Grow{0}); }), ErrorCode::Precondition);
  EXPECT_EQ(code_of([&] { apply_in_place(s, Grow{-3}); }), ErrorCode::Precondition);
  EXPECT_EQ(code_of([&] { apply_in_place(s, SetTension{TensionSide::Left, -1}); }),
            ErrorCode::Precondition);
  EXPECT_EQ(code_of([&] { apply_in_place(s, SetPressure{0}); }), ErrorCode::Precondition);
}

TEST(Apply, PureVariantLeavesInputUntouched) {
  auto s = fresh();
  apply_in_place(s, Grow{400});
  const auto before = s;
  const auto res = apply(s, Grow{100});
  EXPECT_EQ(s.everted_len, before.everted_len);
  EXPECT_EQ(res.state.everted_len, 500.0);
}

TEST(Apply, EqualCurvatureGrowthMerges) {
  auto s = fresh();
  run(s, {Grow{300}, SetTension{TensionSide::Left, 7.0}});
  for (int i = 0; i < 20; ++i) apply_in_place(s, Grow{15});
  // Line from the straight phase plus one merged arc.
  EXPECT_EQ(s.locked.size(), 2u);
}

TEST(Apply, LongArcsSplitBeforeFullTurn) {
  auto s = fresh();
  run(s, {Grow{200}, SetTension{TensionSide::Left, 10.0}, Grow{2000}});
  for (const auto& p : s.locked) {
    if (const auto* a = std::get_if<Arc>(&p)) EXPECT_LT(a->angle, 2 * kPi);
  }
  EXPECT_FALSE(check_invariants(s).has_value());
}

TEST(Separation, StraightBodyNoRisk) {
  auto s = fresh();
  apply_in_place(s, Grow{800});
  EXPECT_TRUE(check_separation(s).empty());
}

TEST(Separation, ThresholdAgainstWorkedExample) {
  DesignParams d;
  d.beam_radius = 40.0;
  auto s = new_session(d, 7.0);
  // Lock a quarter turn at the minimum radius for r = 40 mm.
  const double rmin = min_bend_radius(d);
  run(s, {Grow{200}, SetTension{TensionSide::Left, 10.0}, Grow{(rmin + 40) * kPi / 2},
          SetTension{TensionSide::None, 0}, Grow{200}});
  const Arc* arc = nullptr;
  for (const auto& p : s.locked) {
    if (const auto* a = std::get_if<Arc>(&p)) arc = a;
  }
  ASSERT_NE(arc, nullptr);
  ASSERT_NEAR(arc->angle, kPi / 2, 1e-9);
  EXPECT_NEAR(locked_arc_separation_pressure(*arc, d), 4.48, 5e-3);

  const auto at7 = apply_in_place(s, SetPressure{7.0});
  ASSERT_EQ(at7.size(), 1u);
  EXPECT_NEAR(std::get<SeparationRisk>(at7[0].kind).p_min, 4.48, 5e-3);
  EXPECT_LE(at7[0].at_len, s.everted_len);
  EXPECT_TRUE(apply_in_place(s, SetPressure{3.0}).empty());
  EXPECT_TRUE(check_separation(s).empty());
}

TEST(Snapshot, FreshIsBasePoint) {
  const auto snap = snapshot(fresh(), {10, 20, 0.5});
  ASSERT_EQ(snap.centerline.points.size(), 1u);
  EXPECT_EQ(snap.centerline.points[0], (Point2{10, 20}));
  EXPECT_EQ(snap.lock_boundary_index, 0u);
}

TEST(Snapshot, StraightCenterlineAndBoundary) {
  auto s = fresh();
  apply_in_place(s, Grow{500});
  const auto snap = snapshot(s, {}, 0.2);
  EXPECT_NEAR(snap.centerline.points.back().x, 500.0, 1e-9);
  EXPECT_NEAR(polyline_length(snap.centerline), 500.0, 1e-9);
  // Points [0, b) lie strictly before the lock boundary at 300 mm.
  const auto b = snap.lock_boundary_index;
  ASSERT_GT(b, 0u);
  EXPECT_LT(snap.centerline.points[b - 1].x, 300.0);
  EXPECT_GE(snap.centerline.points[b].x, 300.0 - 1e-9);
}

TEST(Disturbance, OpensMostDistalOpposingArcPreservingMaterial) {
  auto s = fresh(7.0, true);
  run(s, {Grow{200}, SetTension{TensionSide::Right, 10}, Grow{400}, SetTension{TensionSide::None, 0},
          Grow{200}});
  ASSERT_EQ(s.locked.size(), 2u);
  const Arc before = std::get<Arc>(s.locked[0]);
  const double material = locked_material_length(s);
  apply_in_place(s, SetTension{TensionSide::Left, 10});
  const Arc after = std::get<Arc>(s.locked[0]);
  EXPECT_NEAR(before.angle - after.angle, 10.0 * kPi / 180.0, 1e-12);
  EXPECT_GT(after.radius, before.radius);
  EXPECT_NEAR(locked_material_length(s), material, 1e-9);
  EXPECT_FALSE(check_invariants(s).has_value());
}

TEST(Disturbance, OffLeavesLockedBendsAlone) {
  auto s = fresh(7.0, false);
  run(s, {Grow{200}, SetTension{TensionSide::Right, 10}, Grow{400}, SetTension{TensionSide::None, 0},
          Grow{200}});
  const Shape before = s.locked;
  apply_in_place(s, SetTension{TensionSide::Left, 10});
  EXPECT_TRUE(same_shape(before, s.locked));
}

TEST(Invariants, RandomSequencesConserveLengthAndPassivity) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> len(0.5, 300), ten(0, 14), pr(0.5, 30);
  for (int seq = 0; seq < 300; ++seq) {
    auto s = fresh(7.0, seq % 2 == 1);
    for (int k = 0; k < 30 && !s.finished; ++k) {
      const auto pick = rng() % 3;
      Command c;
      if (pick == 0) {
        c = Grow{len(rng)};
      } else if (pick == 1) {
        const auto side = static_cast<TensionSide>(rng() % 3);
        c = SetTension{side, ten(rng)};
      } else {
        c = SetPressure{pr(rng)};
      }
      const Shape locked_before = s.locked;
      const bool passive = s.tension.newtons == 0.0 && !std::holds_alternative<SetTension>(c);
      apply_in_place(s, c);
      const auto bad = check_invariants(s);
      ASSERT_FALSE(bad.has_value()) << *bad;
      if (passive) {
        // Every fully locked primitive except the last, which may have grown by merging.
        for (std::size_t i = 0; i + 1 < locked_before.size(); ++i) {
          ASSERT_TRUE(same_shape(Shape{locked_before[i]}, Shape{s.locked[i]}));
        }
      }
    }
  }
}

TEST(Determinism, IdenticalSequencesGiveIdenticalStates) {
  const std::vector<Command> cmds{Grow{250}, SetTension{TensionSide::Left, 6.5}, Grow{410.25},
                                  SetTension{TensionSide::Right, 10}, Grow{333}, SetPressure{9}};
  auto a = new_session(DesignParams{}, 7.0, {true});
  auto b = new_session(DesignParams{}, 7.0, {true});
  for (const auto& c : cmds) {
    apply_in_place(a, c);
    apply_in_place(b, c);
  }
  EXPECT_TRUE(same_shape(a.locked, b.locked));
  EXPECT_EQ(a.unlocked_curvature, b.unlocked_curvature);
  const auto pa = snapshot(a, {}).centerline.points;
  const auto pb = snapshot(b, {}).centerline.points;
  ASSERT_EQ(pa.size(), pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_EQ(pa[i], pb[i]);
}
