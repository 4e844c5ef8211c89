#include "vinelock/io/json_codec.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>

#include "vinelock/error.hpp"

namespace vinelock::io {

namespace {

std::string join(const std::string& ptr, const std::string& key) { return ptr + "/" + key; }
std::string join(const std::string& ptr, std::size_t index) {
  return ptr + "/" + std::to_string(index);
}

const char* type_name(const Json& j) { return j.type_name(); }

double as_number(const Json& j, const std::string& ptr) {
  if (!j.is_number()) {
    throw SchemaError(ptr, std::string("expected a number, got ") + type_name(j));
  }
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw SchemaError(ptr, "number must be finite");
  return v;
}

class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string ptr, std::initializer_list<const char*> allowed)
      : j_(j), ptr_(std::move(ptr)) {
    if (!j_.is_object()) {
      throw SchemaError(ptr_, std::string("expected an object, got ") + type_name(j_));
    }
    for (const auto& [key, value] : j_.items()) {
      bool known = false;
      for (const char* a : allowed) known = known || key == a;
      if (!known) throw SchemaError(join(ptr_, key), "unknown field");
    }
  }

  const Json* find(const char* key) const {
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  double number(const char* key) const {
    const Json* v = find(key);
    if (v == nullptr) throw SchemaError(join(ptr_, key), "required field missing");
    return as_number(*v, join(ptr_, key));
  }
  double number(const char* key, double fallback) const {
    const Json* v = find(key);
    return v == nullptr ? fallback : as_number(*v, join(ptr_, key));
  }
  bool boolean(const char* key, bool fallback) const {
    const Json* v = find(key);
    if (v == nullptr) return fallback;
    if (!v->is_boolean()) throw SchemaError(join(ptr_, key), "expected a boolean");
    return v->get<bool>();
  }
  std::string string(const char* key) const {
    const Json* v = find(key);
    if (v == nullptr) throw SchemaError(join(ptr_, key), "required field missing");
    if (!v->is_string()) throw SchemaError(join(ptr_, key), "expected a string");
    return v->get<std::string>();
  }
  std::size_t index(const char* key) const {
    const Json* v = find(key);
    if (v == nullptr) throw SchemaError(join(ptr_, key), "required field missing");
    if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0)) {
      throw SchemaError(join(ptr_, key), "expected a non-negative integer");
    }
    return v->get<std::size_t>();
  }
  std::string path(const char* key) const { return join(ptr_, key); }

 private:
  const Json& j_;
  std::string ptr_;
};

// {"Tag": {...}} with exactly one key.
std::pair<std::string, const Json*> tagged(const Json& j, const std::string& ptr) {
  if (!j.is_object() || j.size() != 1) {
    throw SchemaError(ptr, "expected an object with exactly one variant tag");
  }
  const auto it = j.begin();
  return {it.key(), &it.value()};
}

TensionSide side_from_string(const std::string& s, const std::string& ptr) {
  if (s == "Left") return TensionSide::Left;
  if (s == "Right") return TensionSide::Right;
  if (s == "None") return TensionSide::None;
  throw SchemaError(ptr, "expected \"Left\", \"Right\" or \"None\", got \"" + s + "\"");
}

Turn turn_from_string(const std::string& s, const std::string& ptr) {
  if (s == "Left") return Turn::Left;
  if (s == "Right") return Turn::Right;
  throw SchemaError(ptr, "expected \"Left\" or \"Right\", got \"" + s + "\"");
}

}  // namespace

const char* to_string(TensionSide side) noexcept {
  switch (side) {
    case TensionSide::Left: return "Left";
    case TensionSide::Right: return "Right";
    case TensionSide::None: return "None";
  }
  return "None";
}

const char* to_string(Turn turn) noexcept { return turn == Turn::Left ? "Left" : "Right"; }

Json to_json(const Pose& p) { return {{"x", p.x}, {"y", p.y}, {"heading", p.heading}}; }

Json to_json(const ShapePrimitive& p) {
  if (const auto* line = std::get_if<Line>(&p)) return {{"Line", {{"length", line->length}}}};
  const auto& arc = std::get<Arc>(p);
  return {{"Arc", {{"radius", arc.radius}, {"angle", arc.angle}, {"turn", to_string(arc.turn)}}}};
}

Json to_json(const Shape& s) {
  Json out = Json::array();
  for (const auto& p : s) out.push_back(to_json(p));
  return out;
}

Json to_json(const Polyline& p) {
  Json out = Json::array();
  for (const auto& q : p.points) out.push_back({q.x, q.y});
  return out;
}

Json to_json(const FastenerParams& f) {
  return {{"width", f.width},
          {"thickness", f.thickness},
          {"sigma_star", f.sigma_star},
          {"tau_star", f.tau_star},
          {"pinch_offset", f.pinch_offset},
          {"calibrated", f.calibrated}};
}

Json to_json(const StiffnessParams& s) {
  return {{"k_unlocked", s.k_unlocked}, {"k_locked", s.k_locked}, {"s_unlocked", s.s_unlocked},
          {"s_locked", s.s_locked},     {"t_full", s.t_full}};
}

Json to_json(const DesignParams& d) {
  return {{"beam_radius", d.beam_radius},
          {"stoppers", {{"stopper_len", d.stoppers.stopper_len}, {"gap_len", d.stoppers.gap_len}}},
          {"leg_len", d.leg_len},
          {"max_length", d.max_length},
          {"fastener", to_json(d.fastener)},
          {"stiffness", to_json(d.stiffness)}};
}

Json to_json(const Command& c) {
  if (const auto* g = std::get_if<Grow>(&c)) return {{"Grow", {{"delta_len", g->delta_len}}}};
  if (const auto* t = std::get_if<SetTension>(&c)) {
    return {{"SetTension", {{"side", to_string(t->side)}, {"tension", t->tension}}}};
  }
  return {{"SetPressure", {{"gauge", std::get<SetPressure>(c).gauge}}}};
}

Json to_json(const Event& e) {
  Json out;
  if (const auto* risk = std::get_if<SeparationRisk>(&e.kind)) {
    out = {{"kind", "SeparationRisk"}, {"arc_index", risk->arc_index}, {"p_min", risk->p_min}};
  } else if (const auto* cap = std::get_if<TensionCapped>(&e.kind)) {
    out = {{"kind", "TensionCapped"}, {"requested", cap->requested}, {"applied", cap->applied}};
  } else {
    out = {{"kind", "MaxLengthReached"}};
  }
  out["at_len"] = e.at_len;
  return out;
}

Json to_json(const std::vector<Event>& events) {
  Json out = Json::array();
  for (const auto& e : events) out.push_back(to_json(e));
  return out;
}

Json to_json(const Tension& t) { return {{"side", to_string(t.side)}, {"newtons", t.newtons}}; }

Json to_json(const Plan& p) {
  Json steps = Json::array();
  for (const auto& c : p.steps) steps.push_back(to_json(c));
  Json warnings = Json::array();
  for (const auto& w : p.warnings) {
    Json jw = {{"kind", w.kind == PlanWarning::Kind::SeparationRisk ? "SeparationRisk"
                                                                     : "UnrealizableTail"},
               {"primitive_index", w.primitive_index},
               {"message", w.message}};
    if (w.kind == PlanWarning::Kind::SeparationRisk) jw["p_min"] = w.p_min_kpa;
    warnings.push_back(std::move(jw));
  }
  return {{"steps", std::move(steps)},
          {"predicted_shape", to_json(p.predicted_shape)},
          {"total_growth", p.total_growth},
          {"pressure", p.pressure},
          {"base", to_json(p.base)},
          {"warnings", std::move(warnings)}};
}

Json to_json(const FitReport& r) {
  return {{"shape", to_json(r.shape)},
          {"base", to_json(r.base)},
          {"residual", r.residual},
          {"primitive_count", r.primitive_count}};
}

Pose pose_from_json(const Json& j, const std::string& ptr) {
  const ObjectReader o(j, ptr, {"x", "y", "heading"});
  return {o.number("x", 0.0), o.number("y", 0.0), o.number("heading", 0.0)};
}

ShapePrimitive primitive_from_json(const Json& j, const std::string& ptr) {
  const auto [tag, body] = tagged(j, ptr);
  const std::string inner = join(ptr, tag);
  if (tag == "Line") {
    const ObjectReader o(*body, inner, {"length"});
    return Line{o.number("length")};
  }
  if (tag == "Arc") {
    const ObjectReader o(*body, inner, {"radius", "angle", "turn"});
    return Arc{o.number("radius"), o.number("angle"),
               turn_from_string(o.string("turn"), o.path("turn"))};
  }
  throw SchemaError(inner, "unknown primitive \"" + tag + "\" (expected Line or Arc)");
}

Shape shape_from_json(const Json& j, const std::string& ptr) {
  if (!j.is_array()) throw SchemaError(ptr, "expected an array of primitives");
  Shape out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(primitive_from_json(j[i], join(ptr, i)));
  return out;
}

Polyline polyline_from_json(const Json& j, const std::string& ptr) {
  if (!j.is_array()) throw SchemaError(ptr, "expected an array of [x_mm, y_mm] pairs");
  Polyline out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = join(ptr, i);
    if (!j[i].is_array() || j[i].size() != 2) throw SchemaError(p, "expected [x_mm, y_mm]");
    out.points.push_back({as_number(j[i][0], join(p, 0)), as_number(j[i][1], join(p, 1))});
  }
  return out;
}

FastenerParams fastener_from_json(const Json& j, const std::string& ptr) {
  const ObjectReader o(j, ptr,
                       {"width", "thickness", "sigma_star", "tau_star", "pinch_offset", "calibrated"});
  const FastenerParams d{};
  return {o.number("width", d.width),           o.number("thickness", d.thickness),
          o.number("sigma_star", d.sigma_star), o.number("tau_star", d.tau_star),
          o.number("pinch_offset", d.pinch_offset), o.boolean("calibrated", d.calibrated)};
}

StiffnessParams stiffness_from_json(const Json& j, const std::string& ptr) {
  const ObjectReader o(j, ptr, {"k_unlocked", "k_locked", "s_unlocked", "s_locked", "t_full"});
  const StiffnessParams d{};
  return {o.number("k_unlocked", d.k_unlocked), o.number("k_locked", d.k_locked),
          o.number("s_unlocked", d.s_unlocked), o.number("s_locked", d.s_locked),
          o.number("t_full", d.t_full)};
}

DesignParams design_from_json(const Json& j, const std::string& ptr) {
  const ObjectReader o(j, ptr,
                       {"beam_radius", "stoppers", "leg_len", "max_length", "fastener", "stiffness"});
  DesignParams d{};
  d.beam_radius = o.number("beam_radius", d.beam_radius);
  d.leg_len = o.number("leg_len", d.leg_len);
  d.max_length = o.number("max_length", d.max_length);
  if (const Json* s = o.find("stoppers")) {
    const ObjectReader so(*s, o.path("stoppers"), {"stopper_len", "gap_len"});
    d.stoppers = {so.number("stopper_len", d.stoppers.stopper_len),
                  so.number("gap_len", d.stoppers.gap_len)};
  }
  if (const Json* f = o.find("fastener")) d.fastener = fastener_from_json(*f, o.path("fastener"));
  if (const Json* s = o.find("stiffness")) {
    d.stiffness = stiffness_from_json(*s, o.path("stiffness"));
  }
  return d;
}

Command command_from_json(const Json& j, const std::string& ptr) {
  const auto [tag, body] = tagged(j, ptr);
  const std::string inner = join(ptr, tag);
  if (tag == "Grow") {
    const ObjectReader o(*body, inner, {"delta_len"});
    return Grow{o.number("delta_len")};
  }
  if (tag == "SetTension") {
    const ObjectReader o(*body, inner, {"side", "tension"});
    return SetTension{side_from_string(o.string("side"), o.path("side")), o.number("tension", 0.0)};
  }
  if (tag == "SetPressure") {
    const ObjectReader o(*body, inner, {"gauge"});
    return SetPressure{o.number("gauge")};
  }
  throw SchemaError(inner,
                    "unknown command \"" + tag + "\" (expected Grow, SetTension or SetPressure)");
}

std::vector<Command> commands_from_json(const Json& j, const std::string& ptr) {
  if (!j.is_array()) throw SchemaError(ptr, "expected an array of commands");
  std::vector<Command> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(command_from_json(j[i], join(ptr, i)));
  return out;
}

Plan plan_from_json(const Json& j, const std::string& ptr) {
  const ObjectReader o(j, ptr,
                       {"steps", "predicted_shape", "total_growth", "pressure", "base", "warnings"});
  Plan p;
  const Json* steps = o.find("steps");
  if (steps == nullptr) throw SchemaError(o.path("steps"), "required field missing");
  p.steps = commands_from_json(*steps, o.path("steps"));
  if (const Json* s = o.find("predicted_shape")) {
    p.predicted_shape = shape_from_json(*s, o.path("predicted_shape"));
  }
  for (const auto& c : p.steps) {
    if (const auto* g = std::get_if<Grow>(&c)) p.total_growth += g->delta_len;
  }
  if (o.find("total_growth") != nullptr) {
    const double declared = o.number("total_growth");
    if (std::abs(declared - p.total_growth) > 1e-6 * std::max(1.0, p.total_growth)) {
      throw SchemaError(o.path("total_growth"), "does not equal the sum of Grow deltas");
    }
  }
  p.pressure = o.number("pressure", p.pressure);
  if (const Json* b = o.find("base")) p.base = pose_from_json(*b, o.path("base"));
  // warnings are informational and regenerated by the planner
  return p;
}

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw SchemaError("", std::string("malformed JSON: ") + e.what());
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json_file(const std::string& path) { return parse_json(read_text_file(path)); }

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

}  // namespace vinelock::io
