// Arc-line fitting of waypoint paths.
//
// 1. Resample the waypoints evenly and score every index range [i, j] with a total
//    least-squares line fit and an algebraic circle fit refined by one Gauss-Newton pass
//    (radius clamped to R_min).
// 2. Dynamic programming finds, for each primitive count k, the cheapest segmentation.
//    Two adjacent lines are disallowed because a tangent-continuous chain cannot turn
//    between them.
// 3. Each segmentation seeds a chain (start heading, per-primitive length and curvature)
//    refined by Levenberg-Marquardt against evenly spaced waypoint samples. The first k
//    whose chain meets the tolerance wins.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "vinelock/error.hpp"
#include "vinelock/planner.hpp"

namespace vinelock {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum SegType : int { kLineSeg = 0, kArcSeg = 1 };

struct LineFit {
  double cost = kInf;
  Point2 dir{1.0, 0.0};
};

struct ArcFit {
  double cost = kInf;
  Point2 center{};
  double radius = 0.0;
  double kappa = 0.0;  // signed
};

LineFit fit_line(std::span<const Point2> pts) {
  LineFit out;
  const auto n = static_cast<double>(pts.size());
  double mx = 0, my = 0;
  for (const auto& p : pts) mx += p.x, my += p.y;
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& p : pts) {
    const double dx = p.x - mx, dy = p.y - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  const double tr = sxx + syy;
  const double det = sxx * syy - sxy * sxy;
  const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
  const double lmin = std::max(0.0, 0.5 * tr - disc);
  const double lmax = 0.5 * tr + disc;
  Point2 d{1.0, 0.0};
  if (std::abs(sxy) > 1e-300) {
    d = {lmax - syy, sxy};
  } else if (syy > sxx) {
    d = {0.0, 1.0};
  }
  const double norm = std::hypot(d.x, d.y);
  d = {d.x / norm, d.y / norm};
  const Point2 chord{pts.back().x - pts.front().x, pts.back().y - pts.front().y};
  if (d.x * chord.x + d.y * chord.y < 0.0) d = {-d.x, -d.y};
  out.cost = lmin;
  out.dir = d;
  return out;
}

double circle_cost(std::span<const Point2> pts, const Point2& c, double radius) {
  double cost = 0.0;
  for (const auto& p : pts) {
    const double e = std::hypot(p.x - c.x, p.y - c.y) - radius;
    cost += e * e;
  }
  return cost;
}

// Best circle of fixed radius, Gauss-Newton on the center.
Point2 fit_center_fixed_radius(std::span<const Point2> pts, Point2 c, double radius) {
  for (int iter = 0; iter < 15; ++iter) {
    Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
    Eigen::Vector2d b = Eigen::Vector2d::Zero();
    for (const auto& p : pts) {
      const double dx = p.x - c.x, dy = p.y - c.y;
      const double dist = std::hypot(dx, dy);
      if (dist < 1e-12) continue;
      const Eigen::Vector2d j(-dx / dist, -dy / dist);
      const double e = dist - radius;
      A += j * j.transpose();
      b -= j * e;
    }
    const Eigen::Vector2d step = A.ldlt().solve(b);
    if (!step.allFinite()) break;
    c = {c.x + step(0), c.y + step(1)};
    if (step.norm() < 1e-10) break;
  }
  return c;
}

ArcFit fit_arc(std::span<const Point2> pts, double r_min) {
  ArcFit out;
  if (pts.size() < 3) return out;
  const auto n = static_cast<Eigen::Index>(pts.size());
  double mx = 0, my = 0;
  for (const auto& p : pts) mx += p.x, my += p.y;
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);

  // Kasa: x^2 + y^2 + D x + E y + F = 0 on centered coordinates.
  Eigen::MatrixXd A(n, 3);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = pts[static_cast<std::size_t>(i)].x - mx;
    const double y = pts[static_cast<std::size_t>(i)].y - my;
    A(i, 0) = x;
    A(i, 1) = y;
    A(i, 2) = 1.0;
    b(i) = -(x * x + y * y);
  }
  const Eigen::Vector3d sol = A.colPivHouseholderQr().solve(b);
  double cx = -0.5 * sol(0), cy = -0.5 * sol(1);
  const double rr = cx * cx + cy * cy - sol(2);
  if (!sol.allFinite() || !(rr > 0.0)) return out;
  double radius = std::sqrt(rr);
  cx += mx;
  cy += my;
  if (!std::isfinite(radius) || radius > 1e9) return out;

  // One geometric Gauss-Newton pass on (cx, cy, R).
  {
    Eigen::Matrix3d JtJ = Eigen::Matrix3d::Zero();
    Eigen::Vector3d Jtr = Eigen::Vector3d::Zero();
    for (const auto& p : pts) {
      const double dx = p.x - cx, dy = p.y - cy;
      const double dist = std::hypot(dx, dy);
      if (dist < 1e-12) continue;
      const Eigen::Vector3d j(-dx / dist, -dy / dist, -1.0);
      JtJ += j * j.transpose();
      Jtr += j * (dist - radius);
    }
    const Eigen::Vector3d step = JtJ.ldlt().solve(-Jtr);
    if (step.allFinite()) {
      const Point2 c2{cx + step(0), cy + step(1)};
      const double r2 = radius + step(2);
      if (r2 > 0.0 && circle_cost(pts, c2, r2) <= circle_cost(pts, {cx, cy}, radius)) {
        cx = c2.x;
        cy = c2.y;
        radius = r2;
      }
    }
  }

  Point2 center{cx, cy};
  if (radius < r_min) {
    radius = r_min;
    center = fit_center_fixed_radius(pts, center, radius);
  }
  const Point2 t{pts[1].x - pts[0].x, pts[1].y - pts[0].y};
  const Point2 toc{center.x - pts[0].x, center.y - pts[0].y};
  const double side = t.x * toc.y - t.y * toc.x;
  out.center = center;
  out.radius = radius;
  out.kappa = (side >= 0.0 ? 1.0 : -1.0) / radius;
  out.cost = circle_cost(pts, center, radius);
  return out;
}

struct Score {
  double cost = kInf;
  int arcs = 0;
  int prev = -1;       // previous breakpoint
  int prev_type = -1;  // type of the previous segment
};

bool better(const Score& a, const Score& b) {
  if (!std::isfinite(a.cost)) return false;
  if (!std::isfinite(b.cost)) return true;
  const double tol = 1e-9 * (1.0 + std::min(a.cost, b.cost));
  if (std::abs(a.cost - b.cost) <= tol) return a.arcs < b.arcs;
  return a.cost < b.cost;
}

struct Segment {
  int from = 0;
  int to = 0;
  int type = kLineSeg;
};

struct Chain {
  std::vector<int> types;
  Eigen::VectorXd params;  // heading, then per segment log(length) [, curvature parameter]
};

class ChainModel {
 public:
  ChainModel(const Chain& chain, const Point2& origin, double kappa_max, double max_len,
             const std::vector<Point2>& targets)
      : types_(chain.types),
        origin_(origin),
        kappa_max_(kappa_max),
        log_max_len_(std::log(max_len)),
        targets_(targets) {}

  Shape shape(const Eigen::VectorXd& p) const {
    Shape out;
    Eigen::Index k = 1;
    for (int type : types_) {
      // Bounded so a wild trial step cannot explode the primitive list.
      const double len = std::exp(std::clamp(p(k++), -30.0, log_max_len_));
      if (type == kLineSeg) {
        out.emplace_back(Line{len});
        continue;
      }
      const double kappa = kappa_max_ * std::tanh(p(k++));
      if (std::abs(kappa) < 1e-12) {
        out.emplace_back(Line{len});
        continue;
      }
      const double radius = 1.0 / std::abs(kappa);
      const Turn turn = kappa > 0.0 ? Turn::Left : Turn::Right;
      double angle = len / radius;
      while (angle > 0.0) {
        const double piece = std::min(angle, 0.999 * kTwoPi);
        out.emplace_back(Arc{radius, piece, turn});
        angle -= piece;
      }
    }
    return out;
  }

  Pose base(const Eigen::VectorXd& p) const { return {origin_.x, origin_.y, p(0)}; }

  Eigen::VectorXd residuals(const Eigen::VectorXd& p) const {
    const Shape s = shape(p);
    const Pose b = base(p);
    const double total = centerline_length(s);
    const auto n = targets_.size();
    Eigen::VectorXd r(static_cast<Eigen::Index>(2 * n));
    for (std::size_t q = 0; q < n; ++q) {
      const double at = total * static_cast<double>(q) / static_cast<double>(n - 1);
      const Pose pose = pose_at(s, b, at);
      r(static_cast<Eigen::Index>(2 * q)) = pose.x - targets_[q].x;
      r(static_cast<Eigen::Index>(2 * q + 1)) = pose.y - targets_[q].y;
    }
    return r;
  }

 private:
  std::vector<int> types_;
  Point2 origin_;
  double kappa_max_;
  double log_max_len_;
  const std::vector<Point2>& targets_;
};

Eigen::VectorXd refine(const ChainModel& model, Eigen::VectorXd p) {
  Eigen::VectorXd r = model.residuals(p);
  double cost = r.squaredNorm();
  double lambda = 1e-3;
  for (int iter = 0; iter < 60; ++iter) {
    Eigen::MatrixXd J(r.size(), p.size());
    for (Eigen::Index j = 0; j < p.size(); ++j) {
      const double h = 1e-7 * std::max(1.0, std::abs(p(j)));
      Eigen::VectorXd q = p;
      q(j) += h;
      J.col(j) = (model.residuals(q) - r) / h;
    }
    const Eigen::MatrixXd A = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * r;
    bool accepted = false;
    double new_cost = cost;
    while (lambda < 1e10) {
      Eigen::MatrixXd damped = A;
      for (Eigen::Index d = 0; d < damped.rows(); ++d) {
        damped(d, d) += lambda * std::max(A(d, d), 1e-9);
      }
      const Eigen::VectorXd delta = damped.ldlt().solve(-g);
      if (delta.allFinite()) {
        const Eigen::VectorXd trial = p + delta;
        const Eigen::VectorXd tr = model.residuals(trial);
        const double c = tr.squaredNorm();
        if (std::isfinite(c) && c < cost) {
          p = trial;
          r = tr;
          new_cost = c;
          accepted = true;
          lambda = std::max(lambda / 3.0, 1e-12);
          break;
        }
      }
      lambda *= 4.0;
    }
    if (!accepted) break;
    const bool stalled = cost - new_cost <= 1e-12 * cost + 1e-18;
    cost = new_cost;
    if (stalled) break;
  }
  return p;
}

}  // namespace

std::size_t fit_eval_points(const Polyline& waypoints, const FitOptions& options) {
  if (options.eval_points >= 2) return options.eval_points;
  return std::max<std::size_t>(waypoints.points.size(), 100);
}

FitReport fit_shape(const Polyline& waypoints, const DesignParams& design, double tol_mm,
                    const FitOptions& options) {
  validate(design);
  validate(waypoints);
  if (!(tol_mm > 0.0)) throw Error(ErrorCode::Precondition, "tolerance must be > 0");
  if (options.primitive_budget == 0) {
    throw Error(ErrorCode::Precondition, "primitive budget must be positive");
  }

  const double r_min = min_bend_radius(design);
  const double kappa_max = 1.0 / r_min;
  const std::size_t n_eval = fit_eval_points(waypoints, options);
  const std::size_t m = std::max<std::size_t>(options.breakpoint_candidates, 3);
  const Polyline cand = resample_evenly(waypoints, m);
  const std::vector<Point2> targets = resample_evenly(waypoints, n_eval).points;
  const std::span<const Point2> pts(cand.points);
  const double spacing = polyline_length(cand) / static_cast<double>(m - 1);

  // Segment costs.
  std::vector<std::array<double, 2>> cost(m * m, {kInf, kInf});
  auto at = [m](std::size_t i, std::size_t j) { return i * m + j; };
  for (std::size_t i = 0; i + 1 < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const auto seg = pts.subspan(i, j - i + 1);
      cost[at(i, j)][kLineSeg] = fit_line(seg).cost;
      cost[at(i, j)][kArcSeg] = fit_arc(seg, r_min).cost;
    }
  }

  const std::size_t k_max = std::min(options.primitive_budget, m - 1);
  // dp[k][j][type]: best segmentation of points 0..j into k+1 segments, last of `type`.
  std::vector<std::vector<std::array<Score, 2>>> dp(k_max, std::vector<std::array<Score, 2>>(m));
  for (std::size_t j = 1; j < m; ++j) {
    for (int t : {kLineSeg, kArcSeg}) {
      dp[0][j][t] = {cost[at(0, j)][t], t == kArcSeg ? 1 : 0, 0, -1};
    }
  }
  for (std::size_t k = 1; k < k_max; ++k) {
    for (std::size_t j = k + 1; j < m; ++j) {
      for (int t : {kLineSeg, kArcSeg}) {
        Score best;
        for (std::size_t i = k; i < j; ++i) {
          for (int pt : {kLineSeg, kArcSeg}) {
            if (pt == kLineSeg && t == kLineSeg) continue;
            const Score& prev = dp[k - 1][i][pt];
            if (!std::isfinite(prev.cost)) continue;
            const Score cand_score{prev.cost + cost[at(i, j)][t], prev.arcs + (t == kArcSeg),
                                   static_cast<int>(i), pt};
            if (better(cand_score, best)) best = cand_score;
          }
        }
        dp[k][j][t] = best;
      }
    }
  }

  std::optional<FitReport> best_report;
  for (std::size_t k = 0; k < k_max; ++k) {
    const auto& last = dp[k][m - 1];
    int type = better(last[kArcSeg], last[kLineSeg]) ? kArcSeg : kLineSeg;
    if (!std::isfinite(last[type].cost)) continue;

    std::vector<Segment> segments(k + 1);
    int j = static_cast<int>(m - 1);
    for (std::size_t kk = k + 1; kk-- > 0;) {
      const Score& s = dp[kk][static_cast<std::size_t>(j)][type];
      segments[kk] = {s.prev, j, type};
      j = s.prev;
      type = s.prev_type;
    }

    // Seed the chain from the segment fits.
    Chain chain;
    std::vector<double> params;
    params.push_back(0.0);
    for (std::size_t s = 0; s < segments.size(); ++s) {
      const auto seg = pts.subspan(static_cast<std::size_t>(segments[s].from),
                                   static_cast<std::size_t>(segments[s].to - segments[s].from + 1));
      chain.types.push_back(segments[s].type);
      params.push_back(std::log(spacing * (segments[s].to - segments[s].from)));
      if (segments[s].type == kLineSeg) {
        if (s == 0) {
          const LineFit lf = fit_line(seg);
          params[0] = std::atan2(lf.dir.y, lf.dir.x);
        }
        continue;
      }
      const ArcFit af = fit_arc(seg, r_min);
      const double ratio = std::clamp(af.kappa / kappa_max, -0.999, 0.999);
      params.push_back(std::atanh(ratio));
      if (s == 0) {
        const double ux = seg[0].x - af.center.x, uy = seg[0].y - af.center.y;
        params[0] = af.kappa > 0.0 ? std::atan2(ux, -uy) : std::atan2(-ux, uy);
      }
    }
    chain.params = Eigen::Map<Eigen::VectorXd>(params.data(), static_cast<Eigen::Index>(params.size()));

    const ChainModel model(chain, waypoints.points.front(), kappa_max,
                           4.0 * polyline_length(waypoints), targets);
    const Eigen::VectorXd p = refine(model, chain.params);

    FitReport report;
    report.shape = model.shape(p);
    report.base = model.base(p);
    report.base.heading = normalize_angle(report.base.heading);
    report.primitive_count = report.shape.size();
    report.residual = mean_config_error(
        forward_kinematics(report.shape, report.base, options.samples_per_mm), waypoints, n_eval);

    if (report.residual <= tol_mm) return report;
    if (!best_report || report.residual < best_report->residual) best_report = report;
  }

  const double best = best_report ? best_report->residual : kInf;
  const std::size_t count = best_report ? best_report->primitive_count : 0;
  throw UnreachableToleranceError(
      best, count,
      "no arc-line chain within " + std::to_string(options.primitive_budget) +
          " primitives meets the tolerance of " + std::to_string(tol_mm) +
          " mm; best residual " + std::to_string(best) + " mm with " + std::to_string(count) +
          " primitives");
}

}  // namespace vinelock
