#pragma once
/**
 * JSON encoding of the domain types. Decoders validate structure and types and report
 * failures as SchemaError with the JSON pointer of the offending value; domain
 * invariants are checked afterwards by the owning module.
 *
 * Field units: lengths mm, angles rad, pressures kPa, tensions N.
 */

#include <json.hpp>
#include <string>
#include <vector>

#include "vinelock/kinematics.hpp"
#include "vinelock/planner.hpp"
#include "vinelock/sim.hpp"
#include "vinelock/statics.hpp"

namespace vinelock::io {

using Json = nlohmann::json;

Json to_json(const Pose& p);
Json to_json(const ShapePrimitive& p);
Json to_json(const Shape& s);
Json to_json(const Polyline& p);  // [[x, y], ...]
Json to_json(const FastenerParams& f);
Json to_json(const StiffnessParams& s);
Json to_json(const DesignParams& d);
Json to_json(const Command& c);
Json to_json(const Event& e);
Json to_json(const std::vector<Event>& events);
Json to_json(const Tension& t);
Json to_json(const Plan& p);
Json to_json(const FitReport& r);

const char* to_string(TensionSide side) noexcept;
const char* to_string(Turn turn) noexcept;

// `ptr` is the JSON pointer of `j` inside the enclosing document.
Pose pose_from_json(const Json& j, const std::string& ptr = "");
ShapePrimitive primitive_from_json(const Json& j, const std::string& ptr = "");
Shape shape_from_json(const Json& j, const std::string& ptr = "");
Polyline polyline_from_json(const Json& j, const std::string& ptr = "");
FastenerParams fastener_from_json(const Json& j, const std::string& ptr = "");
StiffnessParams stiffness_from_json(const Json& j, const std::string& ptr = "");
DesignParams design_from_json(const Json& j, const std::string& ptr = "");
Command command_from_json(const Json& j, const std::string& ptr = "");
std::vector<Command> commands_from_json(const Json& j, const std::string& ptr = "");
Plan plan_from_json(const Json& j, const std::string& ptr = "");

/// Parses text, turning syntax errors into SchemaError at the document root.
Json parse_json(const std::string& text);
Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace vinelock::io
