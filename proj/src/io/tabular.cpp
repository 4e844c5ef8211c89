#include "vinelock/io/tabular.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "vinelock/error.hpp"

namespace vinelock::io {

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    std::string f = line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? std::string{} : f.substr(b, e - b + 1));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_field(const std::string& f, std::size_t line_no, const char* column) {
  double v = 0.0;
  const auto* end = f.data() + f.size();
  const auto [ptr, ec] = std::from_chars(f.data(), end, v);
  if (ec != std::errc{} || ptr != end || f.empty() || !std::isfinite(v)) {
    throw Error(ErrorCode::Schema, fmt::format("line {}: column {} is not a number: \"{}\"",
                                               line_no, column, f));
  }
  return v;
}

std::string points_attr(const std::vector<Point2>& pts, std::size_t from, std::size_t to) {
  std::string out;
  for (std::size_t i = from; i < to; ++i) {
    if (!out.empty()) out += ' ';
    out += format_number(pts[i].x) + "," + format_number(pts[i].y);
  }
  return out;
}

}  // namespace

std::string format_number(double v) { return fmt::format("{}", v); }

std::vector<CalibrationSample> parse_samples_csv(const std::string& text) {
  const auto lines = split_lines(text);
  if (lines.empty() || split_fields(lines[0]) != std::vector<std::string>{"theta_rad", "p_sep_kpa"}) {
    throw Error(ErrorCode::Schema, "line 1: expected header theta_rad,p_sep_kpa");
  }
  std::vector<CalibrationSample> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = split_fields(lines[i]);
    if (f.size() != 2) {
      throw Error(ErrorCode::Schema, fmt::format("line {}: expected 2 columns", i + 1));
    }
    out.push_back({parse_field(f[0], i + 1, "theta_rad"), parse_field(f[1], i + 1, "p_sep_kpa")});
  }
  return out;
}

std::string samples_csv(std::span<const CalibrationSample> samples) {
  std::string out = "theta_rad,p_sep_kpa\n";
  for (const auto& s : samples) out += format_number(s.theta) + "," + format_number(s.p_sep) + "\n";
  return out;
}

Polyline parse_polyline_csv(const std::string& text) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw Error(ErrorCode::Schema, "empty CSV, expected header x_mm,y_mm");
  const auto header = split_fields(lines[0]);
  if (header.size() < 2 || header[0] != "x_mm" || header[1] != "y_mm") {
    throw Error(ErrorCode::Schema, "line 1: expected header starting with x_mm,y_mm");
  }
  Polyline out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = split_fields(lines[i]);
    if (f.size() < 2) throw Error(ErrorCode::Schema, fmt::format("line {}: expected x_mm,y_mm", i + 1));
    const Point2 p{parse_field(f[0], i + 1, "x_mm"), parse_field(f[1], i + 1, "y_mm")};
    if (out.points.empty() || !(out.points.back() == p)) out.points.push_back(p);
  }
  return out;
}

std::string centerline_csv(const Snapshot& snap) {
  std::string out = "x_mm,y_mm,locked\n";
  const auto& pts = snap.centerline.points;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out += format_number(pts[i].x) + "," + format_number(pts[i].y) + "," +
           (i < snap.lock_boundary_index ? "1" : "0") + "\n";
  }
  return out;
}

std::string deploy_svg(const Snapshot& snap, const DesignParams& design, const Polyline* target) {
  const auto& pts = snap.centerline.points;
  double min_x = pts.front().x, max_x = min_x, min_y = pts.front().y, max_y = min_y;
  auto extend = [&](const Point2& p) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  };
  for (const auto& p : pts) extend(p);
  if (target != nullptr) {
    for (const auto& p : target->points) extend(p);
  }
  const double margin = 2.0 * design.beam_radius + 10.0;
  const double w = max_x - min_x + 2.0 * margin;
  const double h = max_y - min_y + 2.0 * margin;
  const std::string diameter = format_number(2.0 * design.beam_radius);

  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}mm\" height=\"{h}mm\" "
      "viewBox=\"{x} {y} {w} {h}\">\n"
      "<g transform=\"scale(1,-1)\" fill=\"none\" stroke-linecap=\"round\" "
      "stroke-linejoin=\"round\">\n",
      fmt::arg("w", format_number(w)), fmt::arg("h", format_number(h)),
      fmt::arg("x", format_number(min_x - margin)), fmt::arg("y", format_number(-(max_y + margin))));

  if (target != nullptr && target->points.size() >= 2) {
    out += "<polyline class=\"target\" stroke=\"#7f7f7f\" stroke-width=\"2\" "
           "stroke-dasharray=\"8 6\" points=\"" +
           points_attr(target->points, 0, target->points.size()) + "\"/>\n";
  }
  const std::size_t b = std::min(snap.lock_boundary_index, pts.size());
  // The locked stroke runs into the first unlocked point so the two regions join.
  const std::size_t locked_end = b == 0 ? 0 : std::min(b + 1, pts.size());
  if (locked_end >= 2) {
    out += "<polyline class=\"locked\" stroke=\"#f28e2b\" stroke-opacity=\"0.45\" stroke-width=\"" +
           diameter + "\" points=\"" + points_attr(pts, 0, locked_end) + "\"/>\n";
    out += "<polyline class=\"locked-centerline\" stroke=\"#f28e2b\" stroke-width=\"2\" points=\"" +
           points_attr(pts, 0, locked_end) + "\"/>\n";
  }
  if (pts.size() - b >= 2) {
    out += "<polyline class=\"unlocked\" stroke=\"#4e79a7\" stroke-opacity=\"0.45\" stroke-width=\"" +
           diameter + "\" points=\"" + points_attr(pts, b, pts.size()) + "\"/>\n";
    out += "<polyline class=\"unlocked-centerline\" stroke=\"#4e79a7\" stroke-width=\"2\" points=\"" +
           points_attr(pts, b, pts.size()) + "\"/>\n";
  }
  out += fmt::format("<circle class=\"base\" cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"#333333\"/>\n",
                     format_number(pts.front().x), format_number(pts.front().y));
  out += "</g>\n</svg>\n";
  return out;
}

}  // namespace vinelock::io
