#pragma once
/**
 * Planar geometry kernel for a cable-steered everting beam: stopper contraction,
 * bend radius limits, arc-line shape composition and the configuration-accuracy
 * metric used to compare deployed and desired centerlines.
 *
 * Lengths are millimetres, angles radians.
 */

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace vinelock {

inline constexpr double kDefaultSamplesPerMm = 0.2;

struct StopperSpec {
  double stopper_len = 19.0;  // l_s
  double gap_len = 19.0;      // l_g
};

enum class Turn { Left, Right };

/// +1 for a counter-clockwise (left) turn, -1 for clockwise.
constexpr double turn_sign(Turn t) noexcept { return t == Turn::Left ? 1.0 : -1.0; }

struct Line {
  double length = 0.0;
  friend bool operator==(const Line&, const Line&) = default;
};

struct Arc {
  double radius = 0.0;
  double angle = 0.0;
  Turn turn = Turn::Left;

  /// Signed curvature, positive for left turns.
  double curvature() const noexcept { return turn_sign(turn) / radius; }
  friend bool operator==(const Arc&, const Arc&) = default;
};

using ShapePrimitive = std::variant<Line, Arc>;
using Shape = std::vector<ShapePrimitive>;

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
};

struct Polyline {
  std::vector<Point2> points;
};

/// Wraps an angle into (-pi, pi].
double normalize_angle(double angle) noexcept;

/// Rigid-motion composition: `local` expressed in the frame of `frame`.
Pose compose(const Pose& frame, const Pose& local) noexcept;
Point2 transform(const Pose& frame, const Point2& p) noexcept;

void validate(const StopperSpec& s);
void validate(const ShapePrimitive& p);
void validate(const Shape& shape);
/// Requires at least two points and distinct consecutive points.
void validate(const Polyline& p);

/// Fraction of length removed when every stopper gap on one side is closed.
double contraction_ratio(const StopperSpec& s);

/// Smallest achievable bend radius for beam radius `r` and contraction ratio `a`.
///
/// The result equals `r` at a = 1 and `3r` at a = 0.5; it only reaches `2r` or more
/// when a <= 2/3.
double min_bend_radius(double r, double a);

/// Bend angle from the uncontracted and fully contracted side lengths.
double bend_angle_from_lengths(double outer_len, double contracted_len, double r);

/// Outer-wall length to evert, under tension, to form a bend of radius R and angle theta.
double growth_for_bend(double bend_radius, double r, double theta);

/// Centerline length of a primitive (R * angle for arcs).
double centerline_length(const ShapePrimitive& p) noexcept;
double centerline_length(std::span<const ShapePrimitive> shape) noexcept;

/// Everted material needed for a primitive on a beam of radius r: (R + r) * angle for arcs.
double material_length(const ShapePrimitive& p, double r) noexcept;
double material_length(std::span<const ShapePrimitive> shape, double r) noexcept;

/// Signed curvature, zero for lines.
double curvature(const ShapePrimitive& p) noexcept;

/// Merges neighbouring primitives that share the same curvature. The traced curve is unchanged.
Shape canonicalize(std::span<const ShapePrimitive> shape);

/// Pose reached after travelling `s` millimetres of centerline from `base`.
/// `s` is clamped to [0, centerline_length(shape)].
Pose pose_at(std::span<const ShapePrimitive> shape, const Pose& base, double s);
Pose end_pose(std::span<const ShapePrimitive> shape, const Pose& base);

struct SampledCenterline {
  Polyline polyline;
  std::vector<double> stations;  // centerline arc length of each point
};

/// Samples the centerline on a uniform arc-length grid starting at `base`.
///
/// Spacing is 1/samples_per_mm, tightened to a tenth of the smallest arc radius, and the
/// final point is the exact end of the shape. Sampling depends only on the traced curve,
/// so any split of the same curve into primitives yields the same points. An empty shape
/// gives the single point `base`.
SampledCenterline sample_centerline(std::span<const ShapePrimitive> shape, const Pose& base,
                                    double samples_per_mm = kDefaultSamplesPerMm);
Polyline forward_kinematics(std::span<const ShapePrimitive> shape, const Pose& base,
                            double samples_per_mm = kDefaultSamplesPerMm);

double polyline_length(const Polyline& p) noexcept;

/// `n` points at equal arc-length spacing along `p`, endpoints preserved.
Polyline resample_evenly(const Polyline& p, std::size_t n);

/// Mean distance between index-paired points after resampling both polylines to `n` points.
double mean_config_error(const Polyline& deployed, const Polyline& desired, std::size_t n);

}  // namespace vinelock
