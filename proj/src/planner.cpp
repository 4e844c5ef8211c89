#include "vinelock/planner.hpp"

#include <cmath>
#include <string>

#include "vinelock/error.hpp"

namespace vinelock {

namespace {

constexpr double kBinaryRadiusTol = 0.01;  // relative snap window around R_min

struct Realization {
  TensionSide side = TensionSide::None;
  double tension = 0.0;
};

}  // namespace

Plan plan_from_shape(const Shape& shape, const DesignParams& design, double pressure_kpa,
                     const PlanOptions& options) {
  validate(design);
  validate(shape);
  if (!(pressure_kpa > 0.0)) throw Error(ErrorCode::Precondition, "pressure must be > 0");

  const double r = design.beam_radius;
  const double r_min = min_bend_radius(design);
  const double t_full = design.stiffness.t_full;

  Plan plan;
  plan.pressure = pressure_kpa;
  plan.base = options.base;
  Shape target = shape;
  std::vector<Realization> tensions(shape.size());

  for (std::size_t i = 0; i < target.size(); ++i) {
    auto* arc = std::get_if<Arc>(&target[i]);
    if (arc == nullptr) continue;
    if (arc->radius < r_min * (1.0 - 1e-9)) {
      throw InfeasibleCurvatureError(
          i, "primitive " + std::to_string(i) + ": arc radius " + std::to_string(arc->radius) +
                 " mm is below the minimum bend radius " + std::to_string(r_min) + " mm");
    }
    if (options.mode == TensionMode::Binary) {
      if (std::abs(arc->radius - r_min) > kBinaryRadiusTol * r_min) {
        throw InfeasibleCurvatureError(
            i, "primitive " + std::to_string(i) + ": binary tension only realizes R_min = " +
                   std::to_string(r_min) + " mm, got " + std::to_string(arc->radius) + " mm");
      }
      arc->radius = r_min;
      tensions[i] = {arc->turn == Turn::Left ? TensionSide::Left : TensionSide::Right, t_full};
    } else {
      const double t = std::min(t_full, t_full * r_min / arc->radius);
      tensions[i] = {arc->turn == Turn::Left ? TensionSide::Left : TensionSide::Right, t};
    }
  }

  // Material coordinates of primitive starts.
  std::vector<double> starts(target.size() + 1, 0.0);
  for (std::size_t i = 0; i < target.size(); ++i) {
    starts[i + 1] = starts[i] + material_length(target[i], r);
  }
  const double total = starts.back();
  if (total > design.max_length) {
    throw Error(ErrorCode::LengthBudget, "shape needs " + std::to_string(total) +
                                             " mm of material, only " +
                                             std::to_string(design.max_length) + " mm available");
  }

  // Tension for primitive i takes effect when the window reaches its first material.
  double everted = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    plan.steps.emplace_back(SetTension{tensions[i].side, tensions[i].tension});
    const double until = i + 1 < target.size() ? std::min(starts[i + 1] + design.leg_len, total)
                                               : total;
    const double delta = until - everted;
    if (delta > 1e-9) {
      plan.steps.emplace_back(Grow{delta});
      plan.total_growth += delta;
      everted = until;
    }
  }

  const bool realizable =
      target.size() <= 1 || starts[target.size() - 1] + design.leg_len <= total + 1e-9;
  if (realizable) {
    plan.predicted_shape = target;
  } else {
    const VineState end = rollout(plan, design);
    plan.predicted_shape = snapshot(end, plan.base).shape;
    plan.warnings.push_back(
        {PlanWarning::Kind::UnrealizableTail, target.size() - 1, 0.0,
         "final primitives are shorter than the unlocked window (" +
             std::to_string(design.leg_len) +
             " mm); the window holds one curvature, so the tail follows the last primitive"});
  }

  for (std::size_t i = 0; i < plan.predicted_shape.size(); ++i) {
    const auto* arc = std::get_if<Arc>(&plan.predicted_shape[i]);
    if (arc == nullptr) continue;
    const double p_min = locked_arc_separation_pressure(*arc, design);
    if (p_min < pressure_kpa) {
      plan.warnings.push_back({PlanWarning::Kind::SeparationRisk, i, p_min,
                               "arc " + std::to_string(i) + " separates above " +
                                   std::to_string(p_min) + " kPa, below the body pressure " +
                                   std::to_string(pressure_kpa) + " kPa"});
    }
  }
  return plan;
}

VineState rollout(const Plan& plan, const DesignParams& design, const SessionOptions& options) {
  VineState state = new_session(design, plan.pressure, options);
  for (const auto& cmd : plan.steps) apply_in_place(state, cmd);
  return state;
}

Polyline predict(const Plan& plan, const DesignParams& design, double samples_per_mm) {
  return snapshot(rollout(plan, design), plan.base, samples_per_mm).centerline;
}

}  // namespace vinelock
