#include "vinelock/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "vinelock/error.hpp"

namespace vinelock {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Curvatures closer than this (1/mm) describe the same circle.
constexpr double kCurvatureMergeTol = 1e-9;

Pose advance(const Pose& p, double kappa, double ds) noexcept {
  if (kappa == 0.0) {
    return {p.x + ds * std::cos(p.heading), p.y + ds * std::sin(p.heading), p.heading};
  }
  const double h1 = p.heading + kappa * ds;
  return {p.x + (std::sin(h1) - std::sin(p.heading)) / kappa,
          p.y + (std::cos(p.heading) - std::cos(h1)) / kappa, normalize_angle(h1)};
}

}  // namespace

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Domain: return "domain";
    case ErrorCode::DegenerateSpec: return "degenerate-spec";
    case ErrorCode::InvalidDesign: return "invalid-design";
    case ErrorCode::Precondition: return "precondition";
    case ErrorCode::InvalidPolyline: return "invalid-polyline";
    case ErrorCode::InfeasibleCurvature: return "infeasible-curvature";
    case ErrorCode::LengthBudget: return "length-budget";
    case ErrorCode::UnreachableTolerance: return "unreachable-tolerance";
    case ErrorCode::InsufficientSamples: return "insufficient-samples";
    case ErrorCode::SessionFinished: return "session-finished";
    case ErrorCode::Schema: return "schema";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

double normalize_angle(double angle) noexcept {
  if (angle > -kPi && angle <= kPi) return angle;
  double a = std::fmod(angle + kPi, kTwoPi);
  if (a <= 0.0) a += kTwoPi;
  return a - kPi;
}

Pose compose(const Pose& frame, const Pose& local) noexcept {
  const double c = std::cos(frame.heading);
  const double s = std::sin(frame.heading);
  return {frame.x + c * local.x - s * local.y, frame.y + s * local.x + c * local.y,
          normalize_angle(frame.heading + local.heading)};
}

Point2 transform(const Pose& frame, const Point2& p) noexcept {
  const double c = std::cos(frame.heading);
  const double s = std::sin(frame.heading);
  return {frame.x + c * p.x - s * p.y, frame.y + s * p.x + c * p.y};
}

void validate(const StopperSpec& s) {
  if (!(s.stopper_len >= 0.0) || !(s.gap_len >= 0.0)) {
    throw Error(ErrorCode::Precondition, "stopper and gap lengths must be non-negative");
  }
  if (s.stopper_len == 0.0 && s.gap_len == 0.0) {
    throw Error(ErrorCode::DegenerateSpec, "stopper and gap lengths are both zero");
  }
}

void validate(const ShapePrimitive& p) {
  if (const auto* line = std::get_if<Line>(&p)) {
    if (!(line->length > 0.0) || !std::isfinite(line->length)) {
      throw Error(ErrorCode::Precondition, "line length must be positive");
    }
    return;
  }
  const auto& arc = std::get<Arc>(p);
  if (!(arc.radius > 0.0) || !std::isfinite(arc.radius)) {
    throw Error(ErrorCode::Precondition, "arc radius must be positive");
  }
  if (!(arc.angle > 0.0) || !(arc.angle < kTwoPi)) {
    throw Error(ErrorCode::Precondition, "arc angle must lie in (0, 2pi)");
  }
}

void validate(const Shape& shape) {
  for (const auto& p : shape) validate(p);
}

void validate(const Polyline& p) {
  if (p.points.size() < 2) {
    throw Error(ErrorCode::InvalidPolyline, "polyline needs at least two points");
  }
  for (std::size_t i = 0; i < p.points.size(); ++i) {
    const auto& q = p.points[i];
    if (!std::isfinite(q.x) || !std::isfinite(q.y)) {
      throw Error(ErrorCode::InvalidPolyline, "non-finite point at index " + std::to_string(i));
    }
    if (i > 0 && q == p.points[i - 1]) {
      throw Error(ErrorCode::InvalidPolyline,
                  "repeated consecutive point at index " + std::to_string(i));
    }
  }
}

double contraction_ratio(const StopperSpec& s) {
  validate(s);
  return s.gap_len / (s.stopper_len + s.gap_len);
}

double min_bend_radius(double r, double a) {
  if (!(r > 0.0)) throw Error(ErrorCode::Precondition, "beam radius must be positive");
  if (!(a > 0.0)) {
    throw Error(ErrorCode::Domain, "contraction ratio must be positive (no contraction, no bend)");
  }
  if (a > 1.0) throw Error(ErrorCode::Domain, "contraction ratio cannot exceed 1");
  return r * (2.0 - a) / a;
}

double bend_angle_from_lengths(double outer_len, double contracted_len, double r) {
  if (!(r > 0.0)) throw Error(ErrorCode::Precondition, "beam radius must be positive");
  if (!(contracted_len >= 0.0)) {
    throw Error(ErrorCode::Precondition, "contracted length must be non-negative");
  }
  if (!(outer_len > contracted_len)) {
    throw Error(ErrorCode::Domain, "contracted length must be shorter than the original length");
  }
  return (outer_len - contracted_len) / (2.0 * r);
}

double growth_for_bend(double bend_radius, double r, double theta) {
  if (!(r > 0.0)) throw Error(ErrorCode::Precondition, "beam radius must be positive");
  if (!(bend_radius >= r)) {
    throw Error(ErrorCode::Domain, "bend radius below beam radius gives a negative inner wall");
  }
  if (!(theta > 0.0)) throw Error(ErrorCode::Precondition, "bend angle must be positive");
  return (bend_radius + r) * theta;
}

double centerline_length(const ShapePrimitive& p) noexcept {
  if (const auto* line = std::get_if<Line>(&p)) return line->length;
  const auto& arc = std::get<Arc>(p);
  return arc.radius * arc.angle;
}

double centerline_length(std::span<const ShapePrimitive> shape) noexcept {
  double total = 0.0;
  for (const auto& p : shape) total += centerline_length(p);
  return total;
}

double material_length(const ShapePrimitive& p, double r) noexcept {
  if (const auto* line = std::get_if<Line>(&p)) return line->length;
  const auto& arc = std::get<Arc>(p);
  return (arc.radius + r) * arc.angle;
}

double material_length(std::span<const ShapePrimitive> shape, double r) noexcept {
  double total = 0.0;
  for (const auto& p : shape) total += material_length(p, r);
  return total;
}

double curvature(const ShapePrimitive& p) noexcept {
  if (std::holds_alternative<Line>(p)) return 0.0;
  return std::get<Arc>(p).curvature();
}

Shape canonicalize(std::span<const ShapePrimitive> shape) {
  Shape out;
  out.reserve(shape.size());
  for (const auto& p : shape) {
    if (!out.empty() && std::abs(curvature(out.back()) - curvature(p)) <= kCurvatureMergeTol) {
      if (auto* line = std::get_if<Line>(&out.back())) {
        line->length += centerline_length(p);
        continue;
      }
      if (auto* arc = std::get_if<Arc>(&out.back()); arc && std::holds_alternative<Arc>(p)) {
        arc->angle += centerline_length(p) / arc->radius;
        continue;
      }
    }
    out.push_back(p);
  }
  return out;
}

Pose pose_at(std::span<const ShapePrimitive> shape, const Pose& base, double s) {
  Pose pose{base.x, base.y, normalize_angle(base.heading)};
  double remaining = std::max(0.0, s);
  for (const auto& p : shape) {
    const double len = centerline_length(p);
    const double step = std::min(len, remaining);
    pose = advance(pose, curvature(p), step);
    remaining -= step;
    if (remaining <= 0.0) break;
  }
  return pose;
}

Pose end_pose(std::span<const ShapePrimitive> shape, const Pose& base) {
  return pose_at(shape, base, std::numeric_limits<double>::infinity());
}

SampledCenterline sample_centerline(std::span<const ShapePrimitive> shape, const Pose& base,
                                    double samples_per_mm) {
  if (!(samples_per_mm > 0.0)) {
    throw Error(ErrorCode::Precondition, "sampling density must be positive");
  }
  const Shape merged = canonicalize(shape);
  double spacing = 1.0 / samples_per_mm;
  for (const auto& p : merged) {
    if (const auto* arc = std::get_if<Arc>(&p)) spacing = std::min(spacing, 0.1 * arc->radius);
  }
  const double total = centerline_length(merged);

  SampledCenterline out;
  auto& pts = out.polyline.points;
  Pose start{base.x, base.y, normalize_angle(base.heading)};
  pts.push_back({start.x, start.y});
  out.stations.push_back(0.0);
  if (merged.empty() || !(total > 0.0)) return out;

  const auto full_steps = static_cast<std::size_t>(std::floor(total / spacing + 1e-9));
  pts.reserve(full_steps + 2);
  out.stations.reserve(full_steps + 2);

  // Walk the grid once; `seg_start` is the arc length where primitive `idx` begins.
  std::size_t idx = 0;
  double seg_start = 0.0;
  for (std::size_t k = 1; k <= full_steps; ++k) {
    const double s = static_cast<double>(k) * spacing;
    if (total - s <= 1e-6 * spacing) break;
    while (idx + 1 < merged.size() && s > seg_start + centerline_length(merged[idx])) {
      const double len = centerline_length(merged[idx]);
      start = advance(start, curvature(merged[idx]), len);
      seg_start += len;
      ++idx;
    }
    const Pose q = advance(start, curvature(merged[idx]), s - seg_start);
    pts.push_back({q.x, q.y});
    out.stations.push_back(s);
  }
  while (idx < merged.size()) {
    start = advance(start, curvature(merged[idx]), centerline_length(merged[idx]));
    ++idx;
  }
  pts.push_back({start.x, start.y});
  out.stations.push_back(total);
  return out;
}

Polyline forward_kinematics(std::span<const ShapePrimitive> shape, const Pose& base,
                            double samples_per_mm) {
  return sample_centerline(shape, base, samples_per_mm).polyline;
}

double polyline_length(const Polyline& p) noexcept {
  double total = 0.0;
  for (std::size_t i = 1; i < p.points.size(); ++i) {
    total += std::hypot(p.points[i].x - p.points[i - 1].x, p.points[i].y - p.points[i - 1].y);
  }
  return total;
}

Polyline resample_evenly(const Polyline& p, std::size_t n) {
  if (n < 2) throw Error(ErrorCode::Precondition, "resampling needs at least two points");
  validate(p);
  const auto& pts = p.points;
  std::vector<double> cumulative(pts.size(), 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    cumulative[i] =
        cumulative[i - 1] + std::hypot(pts[i].x - pts[i - 1].x, pts[i].y - pts[i - 1].y);
  }
  const double total = cumulative.back();

  Polyline out;
  out.points.reserve(n);
  out.points.push_back(pts.front());
  std::size_t seg = 1;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double target = total * static_cast<double>(k) / static_cast<double>(n - 1);
    while (seg + 1 < pts.size() && cumulative[seg] < target) ++seg;
    const double seg_len = cumulative[seg] - cumulative[seg - 1];
    const double t = seg_len > 0.0 ? (target - cumulative[seg - 1]) / seg_len : 0.0;
    const auto& a = pts[seg - 1];
    const auto& b = pts[seg];
    out.points.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
  }
  out.points.push_back(pts.back());
  return out;
}

double mean_config_error(const Polyline& deployed, const Polyline& desired, std::size_t n) {
  const Polyline a = resample_evenly(deployed, n);
  const Polyline b = resample_evenly(desired, n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum += std::hypot(a.points[i].x - b.points[i].x, a.points[i].y - b.points[i].y);
  }
  return sum / static_cast<double>(n);
}

}  // namespace vinelock
