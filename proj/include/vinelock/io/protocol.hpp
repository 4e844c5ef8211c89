#pragma once
/**
 * Line-delimited JSON protocol for steering one simulated deployment.
 *
 * Inbound:
 *   {"type":"command","seq":N,"cmd":{"Grow":{"delta_len":100}}}
 *   {"type":"reset","seq":N?,"design":{...}?,"pressure":7?,"disturbance":false?}
 * Outbound, exactly one line per inbound line, echoing its seq (null when unknown):
 *   {"type":"state","seq":N,"snapshot":{...},"events":[...]}
 *   {"type":"error","seq":N,"message":"..."}
 */

#include <string>
#include <string_view>

#include "vinelock/io/json_codec.hpp"
#include "vinelock/kinematics.hpp"
#include "vinelock/sim.hpp"

namespace vinelock::io {

struct ProtocolConfig {
  DesignParams design{};
  double pressure = 7.0;  // kPa
  SessionOptions options{};
  Pose base{};
  double samples_per_mm = kDefaultSamplesPerMm;
};

Json snapshot_to_json(const VineState& state, const Snapshot& snap);

class ProtocolSession {
 public:
  explicit ProtocolSession(ProtocolConfig config);

  /// Handles one inbound line and returns the outbound line, without a trailing newline.
  std::string handle_line(std::string_view line);

  const VineState& state() const noexcept { return state_; }
  Snapshot current_snapshot() const;

 private:
  Json state_message(const Json& seq, const std::vector<Event>& events) const;

  ProtocolConfig config_;
  VineState state_;
};

}  // namespace vinelock::io
