#pragma once
/**
 * Deployment state machine for a passively shape-locking everting robot.
 *
 * The distal `leg_len` millimetres of everted material form the unlocked window. Cable
 * tension bends the whole window uniformly; material that leaves the window while growing
 * is locked with the window's curvature at that moment and never moves again, except for
 * the optional locked-bend disturbance applied when tension opposes an existing bend.
 *
 * All lengths in this module are everted material lengths: a locked arc of radius R and
 * angle theta accounts for (R + r) * theta of material.
 */

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "vinelock/kinematics.hpp"
#include "vinelock/statics.hpp"

namespace vinelock {

struct DesignParams {
  double beam_radius = 54.0;  // r, mm
  StopperSpec stoppers{};
  double leg_len = 200.0;     // unlocked window length, mm
  FastenerParams fastener{};
  StiffnessParams stiffness{};
  double max_length = 2300.0;  // available tubing, mm
};

void validate(const DesignParams& d);

/// Minimum bend radius reachable with this design's stoppers.
double min_bend_radius(const DesignParams& d);

/// Bend angle (deg) of a fully contracted unlocked window.
double unlocked_window_cap_deg(const DesignParams& d);

enum class TensionSide { None, Left, Right };

struct Grow {
  double delta_len = 0.0;  // mm of material
};
struct SetTension {
  TensionSide side = TensionSide::None;
  double tension = 0.0;  // N
};
struct SetPressure {
  double gauge = 0.0;  // kPa
};
using Command = std::variant<Grow, SetTension, SetPressure>;

void validate(const Command& c);

struct SeparationRisk {
  std::size_t arc_index = 0;
  double p_min = 0.0;  // kPa
};
struct MaxLengthReached {};
struct TensionCapped {
  double requested = 0.0;  // N
  double applied = 0.0;    // N
};
using EventKind = std::variant<SeparationRisk, MaxLengthReached, TensionCapped>;

struct Event {
  EventKind kind;
  double at_len = 0.0;  // everted length when emitted
};

struct Tension {
  TensionSide side = TensionSide::None;
  double newtons = 0.0;
};

struct SessionOptions {
  bool disturbance = false;
};

struct VineState {
  DesignParams design;
  SessionOptions options;
  double pressure = 0.0;        // kPa
  double everted_len = 0.0;     // mm
  Shape locked;                 // proximal to distal
  double unlocked_len = 0.0;    // mm
  double unlocked_curvature = 0.0;  // signed, 1/mm
  Tension tension;
  std::vector<Event> events;
  bool finished = false;        // set once growth was truncated at max_length
};

VineState new_session(const DesignParams& design, double pressure_kpa,
                      const SessionOptions& options = {});

struct ApplyResult {
  VineState state;
  std::vector<Event> events;
};

ApplyResult apply(const VineState& state, const Command& cmd);

/// Same transition as `apply`, mutating `state`. Returns the events emitted by `cmd`.
std::vector<Event> apply_in_place(VineState& state, const Command& cmd);

/// One SeparationRisk per locked arc whose separation pressure is below the body pressure.
std::vector<Event> check_separation(const VineState& state);

/// Separation pressure of a locked arc; arcs of half a turn or more are reported as 0 kPa.
double locked_arc_separation_pressure(const Arc& arc, const DesignParams& design);

struct Snapshot {
  Shape shape;
  Polyline centerline;
  std::size_t lock_boundary_index = 0;  // points [0, index) are locked
};

Snapshot snapshot(const VineState& state, const Pose& base,
                  double samples_per_mm = kDefaultSamplesPerMm);

/// Shape of the unlocked window, if any material is everted.
std::optional<ShapePrimitive> window_primitive(const VineState& state);

/// Total material held in the locked primitives.
double locked_material_length(const VineState& state);

/// Describes the first violated state invariant, or nullopt when all hold.
std::optional<std::string> check_invariants(const VineState& state);

}  // namespace vinelock
