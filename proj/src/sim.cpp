#include "vinelock/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <type_traits>

#include "vinelock/error.hpp"

namespace vinelock {

namespace {

constexpr double kCurvatureMergeTol = 1e-9;  // 1/mm
// Locked arcs are split before they close a full turn.
constexpr double kMaxArcAngle = 2.0 * std::numbers::pi * (1.0 - 1e-9);

double side_sign(TensionSide side) noexcept {
  switch (side) {
    case TensionSide::Left: return 1.0;
    case TensionSide::Right: return -1.0;
    case TensionSide::None: return 0.0;
  }
  return 0.0;
}

void append_locked(VineState& state, double kappa, double material) {
  if (!(material > 0.0)) return;
  const double r = state.design.beam_radius;
  auto& locked = state.locked;

  if (!locked.empty() && std::abs(curvature(locked.back()) - kappa) <= kCurvatureMergeTol) {
    if (auto* line = std::get_if<Line>(&locked.back())) {
      line->length += material;
      return;
    }
    auto& arc = std::get<Arc>(locked.back());
    const double room = (kMaxArcAngle - arc.angle) * (arc.radius + r);
    const double take = std::min(material, std::max(0.0, room));
    arc.angle += take / (arc.radius + r);
    material -= take;
  }

  while (material > 0.0) {
    if (kappa == 0.0) {
      locked.emplace_back(Line{material});
      return;
    }
    const double radius = 1.0 / std::abs(kappa);
    const double take = std::min(material, kMaxArcAngle * (radius + r));
    locked.emplace_back(Arc{radius, take / (radius + r), kappa > 0.0 ? Turn::Left : Turn::Right});
    material -= take;
  }
}

// Opens the most distal locked bend that turns against the cable side. Its material
// length is preserved, so the radius grows as the angle shrinks.
void disturb_locked_bend(VineState& state, TensionSide side, double tension_n) {
  const double delta = tip_deflection(tension_n, Regime::Locked, state.design.stiffness) *
                       std::numbers::pi / 180.0;
  if (!(delta > 0.0)) return;
  const Turn opposing = side == TensionSide::Left ? Turn::Right : Turn::Left;
  const double r = state.design.beam_radius;
  for (auto it = state.locked.rbegin(); it != state.locked.rend(); ++it) {
    auto* arc = std::get_if<Arc>(&*it);
    if (arc == nullptr || arc->turn != opposing) continue;
    const double material = (arc->radius + r) * arc->angle;
    const double angle = arc->angle - delta;
    if (angle <= 1e-12) {
      *it = Line{material};
    } else {
      arc->angle = angle;
      arc->radius = material / angle - r;
    }
    return;
  }
}

}  // namespace

void validate(const DesignParams& d) {
  try {
    if (!(d.beam_radius > 0.0)) throw Error(ErrorCode::InvalidDesign, "beam_radius must be > 0");
    if (!(d.leg_len > 0.0)) throw Error(ErrorCode::InvalidDesign, "leg_len must be > 0");
    if (!(d.max_length > d.leg_len)) {
      throw Error(ErrorCode::InvalidDesign, "max_length must exceed leg_len");
    }
    if (!(contraction_ratio(d.stoppers) > 0.0)) {
      throw Error(ErrorCode::InvalidDesign, "stoppers allow no contraction (gap_len is 0)");
    }
    validate(d.fastener);
    validate(d.stiffness);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidDesign) throw;
    throw Error(ErrorCode::InvalidDesign, e.what());
  }
}

double min_bend_radius(const DesignParams& d) {
  return min_bend_radius(d.beam_radius, contraction_ratio(d.stoppers));
}

double unlocked_window_cap_deg(const DesignParams& d) {
  return d.leg_len / (min_bend_radius(d) + d.beam_radius) * 180.0 / std::numbers::pi;
}

void validate(const Command& c) {
  std::visit(
      [](const auto& cmd) {
        using T = std::decay_t<decltype(cmd)>;
        if constexpr (std::is_same_v<T, Grow>) {
          if (!(cmd.delta_len > 0.0) || !std::isfinite(cmd.delta_len)) {
            throw Error(ErrorCode::Precondition, "Grow.delta_len must be > 0");
          }
        } else if constexpr (std::is_same_v<T, SetTension>) {
          if (!(cmd.tension >= 0.0) || !std::isfinite(cmd.tension)) {
            throw Error(ErrorCode::Precondition, "SetTension.tension must be >= 0");
          }
        } else {
          if (!(cmd.gauge > 0.0) || !std::isfinite(cmd.gauge)) {
            throw Error(ErrorCode::Precondition, "SetPressure.gauge must be > 0");
          }
        }
      },
      c);
}

VineState new_session(const DesignParams& design, double pressure_kpa,
                      const SessionOptions& options) {
  validate(design);
  if (!(pressure_kpa > 0.0)) throw Error(ErrorCode::Precondition, "pressure must be > 0");
  VineState s;
  s.design = design;
  s.options = options;
  s.pressure = pressure_kpa;
  return s;
}

std::vector<Event> apply_in_place(VineState& state, const Command& cmd) {
  if (state.finished) {
    throw Error(ErrorCode::SessionFinished, "session finished: tubing exhausted");
  }
  validate(cmd);
  std::vector<Event> emitted;

  if (const auto* grow = std::get_if<Grow>(&cmd)) {
    const double remaining = state.design.max_length - state.everted_len;
    double delta = grow->delta_len;
    bool truncated = false;
    if (delta > remaining) {
      delta = std::max(0.0, remaining);
      truncated = true;
    }
    const double leg = state.design.leg_len;
    const double before = state.everted_len;
    const double after = truncated ? state.design.max_length : before + delta;
    const double exiting = std::max(0.0, after - leg) - std::max(0.0, before - leg);
    append_locked(state, state.unlocked_curvature, exiting);
    state.everted_len = after;
    state.unlocked_len = std::min(after, leg);
    if (truncated) {
      emitted.push_back({MaxLengthReached{}, after});
      state.finished = true;
    }
  } else if (const auto* set = std::get_if<SetTension>(&cmd)) {
    if (set->side == TensionSide::None) {
      state.tension = {TensionSide::None, 0.0};
      state.unlocked_curvature = 0.0;
    } else {
      const double t_full = state.design.stiffness.t_full;
      const double applied = std::min(set->tension, t_full);
      if (set->tension > t_full) {
        emitted.push_back({TensionCapped{set->tension, applied}, state.everted_len});
      }
      state.tension = {set->side, applied};
      state.unlocked_curvature = side_sign(set->side) * (applied / t_full) /
                                 min_bend_radius(state.design);
      if (state.options.disturbance && applied > 0.0) {
        disturb_locked_bend(state, set->side, applied);
      }
    }
  } else {
    state.pressure = std::get<SetPressure>(cmd).gauge;
    emitted = check_separation(state);
  }

  state.events.insert(state.events.end(), emitted.begin(), emitted.end());
  return emitted;
}

ApplyResult apply(const VineState& state, const Command& cmd) {
  ApplyResult out{state, {}};
  out.events = apply_in_place(out.state, cmd);
  return out;
}

double locked_arc_separation_pressure(const Arc& arc, const DesignParams& design) {
  if (arc.angle >= std::numbers::pi) return 0.0;
  return separation_pressure(arc.angle, design.beam_radius, design.fastener);
}

std::vector<Event> check_separation(const VineState& state) {
  std::vector<Event> out;
  for (std::size_t i = 0; i < state.locked.size(); ++i) {
    const auto* arc = std::get_if<Arc>(&state.locked[i]);
    if (arc == nullptr) continue;
    const double p_min = locked_arc_separation_pressure(*arc, state.design);
    if (p_min < state.pressure) out.push_back({SeparationRisk{i, p_min}, state.everted_len});
  }
  return out;
}

std::optional<ShapePrimitive> window_primitive(const VineState& state) {
  if (!(state.unlocked_len > 0.0)) return std::nullopt;
  if (state.unlocked_curvature == 0.0) return Line{state.unlocked_len};
  const double radius = 1.0 / std::abs(state.unlocked_curvature);
  return Arc{radius, state.unlocked_len / (radius + state.design.beam_radius),
             state.unlocked_curvature > 0.0 ? Turn::Left : Turn::Right};
}

double locked_material_length(const VineState& state) {
  return material_length(state.locked, state.design.beam_radius);
}

Snapshot snapshot(const VineState& state, const Pose& base, double samples_per_mm) {
  Snapshot snap;
  snap.shape = state.locked;
  if (auto w = window_primitive(state)) snap.shape.push_back(*w);
  auto sampled = sample_centerline(snap.shape, base, samples_per_mm);
  snap.centerline = std::move(sampled.polyline);

  if (!state.locked.empty()) {
    const double boundary = centerline_length(state.locked);
    const double eps = 1e-9 * std::max(1.0, boundary);
    const auto it =
        std::lower_bound(sampled.stations.begin(), sampled.stations.end(), boundary - eps);
    snap.lock_boundary_index = static_cast<std::size_t>(it - sampled.stations.begin());
  }
  return snap;
}

std::optional<std::string> check_invariants(const VineState& s) {
  const double leg = s.design.leg_len;
  if (std::abs(s.unlocked_len - std::min(s.everted_len, leg)) > 1e-9) {
    return "unlocked_len differs from min(everted_len, leg_len)";
  }
  const double total = locked_material_length(s) + s.unlocked_len;
  if (std::abs(total - s.everted_len) > 1e-6) {
    return "locked + unlocked material differs from everted_len";
  }
  const double r_min = min_bend_radius(s.design);
  if (std::abs(s.unlocked_curvature) > (1.0 + 1e-12) / r_min) {
    return "unlocked curvature exceeds the minimum bend radius bound";
  }
  if (s.everted_len > s.design.max_length) return "everted_len exceeds max_length";
  for (const auto& p : s.locked) {
    try {
      validate(p);
    } catch (const Error& e) {
      return std::string("invalid locked primitive: ") + e.what();
    }
    if (const auto* arc = std::get_if<Arc>(&p); arc && arc->radius < r_min * (1.0 - 1e-9)) {
      return "locked arc tighter than the minimum bend radius";
    }
  }
  return std::nullopt;
}

}  // namespace vinelock
