#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "vinelock/error.hpp"
#include "vinelock/statics.hpp"

namespace vinelock {

namespace {

// Parameters live in log space so every trial point stays strictly positive.
class PressureModel {
 public:
  PressureModel(std::span<const CalibrationSample> samples, double r_mm, FastenerParams base,
                bool fit_d)
      : samples_(samples), r_mm_(r_mm), base_(base), fit_d_(fit_d) {}

  Eigen::Index dim() const { return fit_d_ ? 3 : 2; }

  Eigen::VectorXd initial() const {
    Eigen::VectorXd x(dim());
    x(0) = std::log(base_.sigma_star);
    x(1) = std::log(base_.tau_star);
    if (fit_d_) x(2) = std::log(base_.pinch_offset);
    return x;
  }

  FastenerParams params(const Eigen::VectorXd& x) const {
    // Clamped so that far-off trial points still evaluate to positive parameters.
    const auto positive = [](double v) { return std::exp(std::clamp(v, -60.0, 60.0)); };
    FastenerParams f = base_;
    f.sigma_star = positive(x(0));
    f.tau_star = positive(x(1));
    if (fit_d_) f.pinch_offset = positive(x(2));
    return f;
  }

  Eigen::VectorXd residuals(const Eigen::VectorXd& x) const {
    const FastenerParams f = params(x);
    Eigen::VectorXd r(static_cast<Eigen::Index>(samples_.size()));
    for (std::size_t i = 0; i < samples_.size(); ++i) {
      r(static_cast<Eigen::Index>(i)) =
          separation_pressure(samples_[i].theta, r_mm_, f) - samples_[i].p_sep;
    }
    return r;
  }

  double cost(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd r = residuals(x);
    return r.squaredNorm();
  }

  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const {
    constexpr double h = 1e-6;
    Eigen::MatrixXd J(static_cast<Eigen::Index>(samples_.size()), dim());
    for (Eigen::Index j = 0; j < dim(); ++j) {
      Eigen::VectorXd xp = x, xm = x;
      xp(j) += h;
      xm(j) -= h;
      J.col(j) = (residuals(xp) - residuals(xm)) / (2.0 * h);
    }
    return J;
  }

 private:
  std::span<const CalibrationSample> samples_;
  double r_mm_;
  FastenerParams base_;
  bool fit_d_;
};

// One sweep of pattern search along each coordinate; true when the cost improved.
bool coordinate_sweep(const PressureModel& model, Eigen::VectorXd& x, double& cost) {
  bool improved = false;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    for (double step = 0.1; step >= 1e-12; step *= 0.1) {
      bool moved = false;
      for (double dir : {1.0, -1.0}) {
        Eigen::VectorXd trial = x;
        trial(j) += dir * step;
        const double c = model.cost(trial);
        if (c < cost) {
          x = trial;
          cost = c;
          moved = true;
          break;
        }
      }
      if (moved) {
        improved = true;
        break;
      }
    }
  }
  return improved;
}

// For a fixed ratio rho = tau*/sigma*, pressure is linear in sigma* and in sigma* * d, so
// each ratio on a log grid has a closed-form best fit. The best grid point seeds the
// Gauss-Newton iteration, which keeps it away from the d -> 0 plateau.
Eigen::VectorXd projected_start(std::span<const CalibrationSample> samples, double r_mm,
                                const FastenerParams& base, bool fit_d) {
  const auto n = static_cast<Eigen::Index>(samples.size());
  Eigen::VectorXd p(n);
  for (Eigen::Index i = 0; i < n; ++i) p(i) = samples[static_cast<std::size_t>(i)].p_sep;

  double best_cost = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best(fit_d ? 3 : 2);
  for (int k = 0; k <= 480; ++k) {
    const double rho = std::pow(10.0, -4.0 + 8.0 * k / 480.0);
    FastenerParams f = base;
    f.sigma_star = 1.0;
    f.tau_star = rho;
    f.pinch_offset = 0.0;
    Eigen::VectorXd p0(n), p1(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double th = samples[static_cast<std::size_t>(i)].theta;
      f.pinch_offset = 0.0;
      p0(i) = separation_pressure(th, r_mm, f);
      f.pinch_offset = 1.0;
      p1(i) = separation_pressure(th, r_mm, f) - p0(i);
    }
    double sigma = 0.0;
    double d = base.pinch_offset;
    if (fit_d) {
      Eigen::MatrixXd A(n, 2);
      A.col(0) = p0;
      A.col(1) = p1;
      const Eigen::Vector2d c = A.colPivHouseholderQr().solve(p);
      sigma = c(0);
      d = sigma > 0.0 ? c(1) / sigma : 0.0;
      if (!(d > 0.0)) d = 1e-3 * r_mm;
    }
    const Eigen::VectorXd col = p0 + d * p1;
    sigma = col.dot(p) / col.squaredNorm();
    if (!(sigma > 0.0)) continue;
    const double cost = (sigma * col - p).squaredNorm();
    if (cost < best_cost) {
      best_cost = cost;
      best(0) = std::log(sigma);
      best(1) = std::log(sigma * rho);
      if (fit_d) best(2) = std::log(d);
    }
  }
  return best;
}

}  // namespace

double calibration_rmse(std::span<const CalibrationSample> samples, double r_mm,
                        const FastenerParams& f) {
  if (samples.empty()) throw Error(ErrorCode::InsufficientSamples, "no calibration samples");
  double sum = 0.0;
  for (const auto& s : samples) {
    const double e = separation_pressure(s.theta, r_mm, f) - s.p_sep;
    sum += e * e;
  }
  return std::sqrt(sum / static_cast<double>(samples.size()));
}

CalibrationResult calibrate_fastener(std::span<const CalibrationSample> samples, double r_mm,
                                     const FastenerParams& init, bool fit_pinch_offset,
                                     const CalibrationOptions& options) {
  std::set<double> angles;
  for (const auto& s : samples) {
    if (!(s.theta > 0.0 && s.theta < std::numbers::pi)) {
      throw Error(ErrorCode::Precondition, "calibration angles must lie in (0, pi)");
    }
    if (!(s.p_sep > 0.0)) {
      throw Error(ErrorCode::Precondition, "separation pressures must be positive");
    }
    angles.insert(s.theta);
  }
  if (samples.size() < 3 || angles.size() < 3) {
    throw Error(ErrorCode::InsufficientSamples,
                "calibration needs at least 3 samples at distinct bend angles");
  }
  if (!(r_mm > 0.0)) throw Error(ErrorCode::Precondition, "beam radius must be positive");
  validate(init);
  if (fit_pinch_offset && !(init.pinch_offset > 0.0)) {
    throw Error(ErrorCode::Precondition, "initial pinch offset must be positive when fitted");
  }

  const PressureModel model(samples, r_mm, init, fit_pinch_offset);
  Eigen::VectorXd x = model.initial();
  double cost = model.cost(x);
  if (const Eigen::VectorXd seed = projected_start(samples, r_mm, init, fit_pinch_offset);
      seed.allFinite()) {
    if (const double c = model.cost(seed); c < cost) {
      x = seed;
      cost = c;
    }
  }

  CalibrationResult result;
  for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
    result.iterations = iter + 1;
    const Eigen::MatrixXd J = model.jacobian(x);
    const Eigen::VectorXd r = model.residuals(x);
    const Eigen::VectorXd delta = J.colPivHouseholderQr().solve(-r);

    double scale = 1.0;
    bool accepted = false;
    for (int halvings = 0; halvings < 40 && delta.allFinite(); ++halvings, scale *= 0.5) {
      const Eigen::VectorXd trial = x + scale * delta;
      const double c = model.cost(trial);
      if (std::isfinite(c) && c < cost) {
        x = trial;
        cost = c;
        accepted = true;
        break;
      }
    }
    if (accepted && (scale * delta).lpNorm<Eigen::Infinity>() < options.step_tolerance) {
      result.converged = true;
      break;
    }
    if (!accepted) {
      if (!coordinate_sweep(model, x, cost)) {
        // Neither route decreases the cost: stationary point.
        result.converged = true;
        break;
      }
    }
  }

  result.params = model.params(x);
  result.params.calibrated = true;
  result.rmse_kpa = std::sqrt(cost / static_cast<double>(samples.size()));
  return result;
}

}  // namespace vinelock
