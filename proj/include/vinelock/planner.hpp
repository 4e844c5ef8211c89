#pragma once
/**
 * Command scheduling for target arc-line shapes and arc-line fitting of waypoint paths.
 */

#include <cstddef>
#include <string>
#include <vector>

#include "vinelock/kinematics.hpp"
#include "vinelock/sim.hpp"

namespace vinelock {

enum class TensionMode {
  Proportional,  // tension t_full * R_min / R realizes any R >= R_min
  Binary,        // zero or t_full only; every arc must be at R_min
};

struct PlanOptions {
  TensionMode mode = TensionMode::Proportional;
  Pose base{};
};

struct PlanWarning {
  enum class Kind { SeparationRisk, UnrealizableTail };
  Kind kind = Kind::SeparationRisk;
  std::size_t primitive_index = 0;
  double p_min_kpa = 0.0;  // SeparationRisk only
  std::string message;
};

struct Plan {
  std::vector<Command> steps;
  Shape predicted_shape;
  double total_growth = 0.0;  // mm of material, sum of Grow deltas
  double pressure = 7.0;      // kPa the plan was checked against
  Pose base{};
  std::vector<PlanWarning> warnings;
};

/// Per primitive: set the cable tension for its curvature, then grow its material length.
///
/// A tension change only bends material inside the unlocked window, so each change is
/// issued once the window covers the start of its primitive, i.e. `leg_len` after the
/// primitive's first material. The last `leg_len` of material therefore has a single
/// curvature; shapes whose final primitive is shorter than that get an UnrealizableTail
/// warning and a predicted shape equal to what the rollout actually produces.
Plan plan_from_shape(const Shape& shape, const DesignParams& design, double pressure_kpa,
                     const PlanOptions& options = {});

/// Replays the plan through a session with disturbance disabled unless requested.
VineState rollout(const Plan& plan, const DesignParams& design,
                  const SessionOptions& options = {});

/// Kinematic rollout (disturbance off) of the plan's deployed centerline.
Polyline predict(const Plan& plan, const DesignParams& design,
                 double samples_per_mm = kDefaultSamplesPerMm);

struct FitOptions {
  std::size_t primitive_budget = 32;
  std::size_t breakpoint_candidates = 121;  // resampled points the segmentation works on
  std::size_t eval_points = 0;              // 0: max(#waypoints, 100)
  double samples_per_mm = kDefaultSamplesPerMm;
};

struct FitReport {
  Shape shape;
  Pose base{};
  double residual = 0.0;  // mean_config_error against the waypoints, mm
  std::size_t primitive_count = 0;
};

/// Fewest-primitive arc-line chain (starting at the first waypoint) whose centerline is
/// within `tol_mm` of the waypoints. Arcs respect the design's minimum bend radius.
FitReport fit_shape(const Polyline& waypoints, const DesignParams& design, double tol_mm,
                    const FitOptions& options = {});

/// Number of points used to score a fit against `waypoints`.
std::size_t fit_eval_points(const Polyline& waypoints, const FitOptions& options);

}  // namespace vinelock
