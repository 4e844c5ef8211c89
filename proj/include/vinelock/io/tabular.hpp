#pragma once
// CSV and SVG emitters/parsers. CSV headers name their units; files are UTF-8 with LF.

#include <span>
#include <string>
#include <vector>

#include "vinelock/kinematics.hpp"
#include "vinelock/sim.hpp"
#include "vinelock/statics.hpp"

namespace vinelock::io {

/// Shortest decimal text that parses back to the same double.
std::string format_number(double v);

/// `theta_rad,p_sep_kpa` rows.
std::vector<CalibrationSample> parse_samples_csv(const std::string& text);
std::string samples_csv(std::span<const CalibrationSample> samples);

/// Any CSV whose first two columns are `x_mm,y_mm`; further columns are ignored.
/// Consecutive duplicate points are dropped.
Polyline parse_polyline_csv(const std::string& text);

/// `x_mm,y_mm,locked` rows for a snapshot centerline.
std::string centerline_csv(const Snapshot& snap);

/// Locked material in orange, the unlocked window in blue, each drawn at the vine
/// diameter over a thin centerline. Millimetre user units, y axis up.
std::string deploy_svg(const Snapshot& snap, const DesignParams& design,
                       const Polyline* target = nullptr);

}  // namespace vinelock::io
