#pragma once
/**
 * Scenario files drive `vinelock simulate`:
 *
 *   {
 *     "design":   {...},                 optional, defaults otherwise
 *     "pressure": 7,                     kPa, optional
 *     "source":   {"commands": [...]} | {"plan": {...}} | {"target": [[x, y], ...]},
 *     "options":  {"disturbance": false, "samples_per_mm": 0.2, "base": {...},
 *                  "tol_mm": 5, "tension_mode": "proportional" | "binary"}
 *   }
 */

#include <optional>
#include <variant>
#include <vector>

#include "vinelock/io/json_codec.hpp"
#include "vinelock/planner.hpp"

namespace vinelock::io {

struct ScenarioOptions {
  bool disturbance = false;
  double samples_per_mm = kDefaultSamplesPerMm;
  std::optional<Pose> base;  // plan sources default to the plan's base
  double tol_mm = 5.0;       // target sources only
  TensionMode tension_mode = TensionMode::Proportional;
};

using ScenarioSource = std::variant<std::vector<Command>, Plan, Polyline>;

struct Scenario {
  DesignParams design{};
  double pressure = 7.0;
  ScenarioSource source;
  ScenarioOptions options{};
};

/// Strict: unknown keys, missing source, or more than one source are schema errors.
Scenario scenario_from_json(const Json& j);

/// Waypoints from a JSON array of [x, y] pairs, a {"waypoints": [...]} object, or CSV.
Polyline read_waypoints(const std::string& path);

}  // namespace vinelock::io
