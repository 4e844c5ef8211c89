#include "vinelock/io/protocol.hpp"

#include "vinelock/error.hpp"

namespace vinelock::io {

namespace {

Json error_message(const Json& seq, const std::string& message) {
  return {{"type", "error"}, {"seq", seq}, {"message", message}};
}

}  // namespace

Json snapshot_to_json(const VineState& state, const Snapshot& snap) {
  return {{"centerline", to_json(snap.centerline)},
          {"lock_boundary_index", snap.lock_boundary_index},
          {"shape", to_json(snap.shape)},
          {"everted_len", state.everted_len},
          {"unlocked_len", state.unlocked_len},
          {"pressure", state.pressure},
          {"tension", to_json(state.tension)},
          {"finished", state.finished}};
}

ProtocolSession::ProtocolSession(ProtocolConfig config)
    : config_(std::move(config)),
      state_(new_session(config_.design, config_.pressure, config_.options)) {}

Snapshot ProtocolSession::current_snapshot() const {
  return snapshot(state_, config_.base, config_.samples_per_mm);
}

Json ProtocolSession::state_message(const Json& seq, const std::vector<Event>& events) const {
  return {{"type", "state"},
          {"seq", seq},
          {"snapshot", snapshot_to_json(state_, current_snapshot())},
          {"events", to_json(events)}};
}

std::string ProtocolSession::handle_line(std::string_view line) {
  Json seq = nullptr;
  try {
    const Json msg = parse_json(std::string(line));
    if (!msg.is_object()) throw SchemaError("", "message must be a JSON object");
    if (const auto it = msg.find("seq"); it != msg.end()) {
      if (!it->is_null() && !it->is_number_integer()) {
        throw SchemaError("/seq", "seq must be an integer");
      }
      seq = *it;
    }
    const auto type = msg.find("type");
    if (type == msg.end() || !type->is_string()) {
      throw SchemaError("/type", "expected \"command\" or \"reset\"");
    }

    if (*type == "command") {
      for (const auto& [key, value] : msg.items()) {
        if (key != "type" && key != "seq" && key != "cmd") throw SchemaError("/" + key, "unknown field");
      }
      const auto cmd_it = msg.find("cmd");
      if (cmd_it == msg.end()) throw SchemaError("/cmd", "required field missing");
      const Command cmd = command_from_json(*cmd_it, "/cmd");
      const auto events = apply_in_place(state_, cmd);
      return state_message(seq, events).dump();
    }

    if (*type == "reset") {
      ProtocolConfig next = config_;
      for (const auto& [key, value] : msg.items()) {
        if (key == "type" || key == "seq") continue;
        if (key == "design") {
          next.design = design_from_json(value, "/design");
        } else if (key == "pressure") {
          if (!value.is_number()) throw SchemaError("/pressure", "expected a number");
          next.pressure = value.get<double>();
        } else if (key == "disturbance") {
          if (!value.is_boolean()) throw SchemaError("/disturbance", "expected a boolean");
          next.options.disturbance = value.get<bool>();
        } else {
          throw SchemaError("/" + key, "unknown field");
        }
      }
      VineState fresh = new_session(next.design, next.pressure, next.options);
      config_ = std::move(next);
      state_ = std::move(fresh);
      return state_message(seq, {}).dump();
    }
    throw SchemaError("/type", "unknown message type " + type->dump());
  } catch (const Error& e) {
    return error_message(seq, std::string(to_string(e.code())) + ": " + e.what()).dump();
  } catch (const std::exception& e) {
    return error_message(seq, e.what()).dump();
  }
}

}  // namespace vinelock::io
