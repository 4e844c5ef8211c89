#include "vinelock/io/scenario.hpp"

#include <cmath>

#include "vinelock/error.hpp"
#include "vinelock/io/tabular.hpp"

namespace vinelock::io {

namespace {

// Re-reports a domain-level validation failure at the given JSON location.
template <typename F>
void at(const std::string& ptr, F&& check) {
  try {
    check();
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    throw SchemaError(ptr, e.what());
  }
}

ScenarioOptions options_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaError("/options", "expected an object");
  ScenarioOptions o;
  for (const auto& [key, value] : j.items()) {
    const std::string ptr = "/options/" + key;
    if (key == "disturbance") {
      if (!value.is_boolean()) throw SchemaError(ptr, "expected a boolean");
      o.disturbance = value.get<bool>();
    } else if (key == "samples_per_mm" || key == "tol_mm") {
      if (!value.is_number()) throw SchemaError(ptr, "expected a number");
      const double v = value.get<double>();
      if (!(v > 0.0) || !std::isfinite(v)) throw SchemaError(ptr, "must be positive");
      (key == "tol_mm" ? o.tol_mm : o.samples_per_mm) = v;
    } else if (key == "base") {
      o.base = pose_from_json(value, ptr);
    } else if (key == "tension_mode") {
      if (value == "proportional") {
        o.tension_mode = TensionMode::Proportional;
      } else if (value == "binary") {
        o.tension_mode = TensionMode::Binary;
      } else {
        throw SchemaError(ptr, "expected \"proportional\" or \"binary\"");
      }
    } else {
      throw SchemaError(ptr, "unknown field");
    }
  }
  return o;
}

}  // namespace

Scenario scenario_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaError("", "scenario must be a JSON object");
  Scenario sc;
  bool have_source = false;
  for (const auto& [key, value] : j.items()) {
    if (key == "design") {
      sc.design = design_from_json(value, "/design");
      at("/design", [&] { validate(sc.design); });
    } else if (key == "pressure") {
      if (!value.is_number()) throw SchemaError("/pressure", "expected a number");
      sc.pressure = value.get<double>();
      if (!(sc.pressure >= 0.0) || !std::isfinite(sc.pressure)) {
        throw SchemaError("/pressure", "must be a finite gauge pressure >= 0");
      }
    } else if (key == "options") {
      sc.options = options_from_json(value);
    } else if (key == "source") {
      if (!value.is_object() || value.size() != 1) {
        throw SchemaError("/source", "expected exactly one of \"commands\", \"plan\", \"target\"");
      }
      const std::string tag = value.begin().key();
      const Json& body = value.begin().value();
      if (tag == "commands") {
        auto cmds = commands_from_json(body, "/source/commands");
        for (std::size_t i = 0; i < cmds.size(); ++i) {
          at("/source/commands/" + std::to_string(i), [&] { validate(cmds[i]); });
        }
        sc.source = std::move(cmds);
      } else if (tag == "plan") {
        Plan plan = plan_from_json(body, "/source/plan");
        for (std::size_t i = 0; i < plan.steps.size(); ++i) {
          at("/source/plan/steps/" + std::to_string(i), [&] { validate(plan.steps[i]); });
        }
        at("/source/plan/predicted_shape", [&] { validate(plan.predicted_shape); });
        sc.source = std::move(plan);
      } else if (tag == "target") {
        Polyline target = polyline_from_json(body, "/source/target");
        at("/source/target", [&] { validate(target); });
        sc.source = std::move(target);
      } else {
        throw SchemaError("/source/" + tag, "unknown source (expected commands, plan or target)");
      }
      have_source = true;
    } else {
      throw SchemaError("/" + key, "unknown field");
    }
  }
  if (!have_source) throw SchemaError("/source", "required field missing");
  return sc;
}

Polyline read_waypoints(const std::string& path) {
  const std::string text = read_text_file(path);
  Polyline p;
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0) {
    p = parse_polyline_csv(text);
  } else {
    const Json j = parse_json(text);
    if (j.is_object()) {
      if (j.size() != 1 || !j.contains("waypoints")) {
        throw SchemaError("", "expected an array of [x, y] pairs or {\"waypoints\": [...]}");
      }
      p = polyline_from_json(j.at("waypoints"), "/waypoints");
    } else {
      p = polyline_from_json(j, "");
    }
  }
  at("", [&] { validate(p); });
  return p;
}

}  // namespace vinelock::io
