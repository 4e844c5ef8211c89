#pragma once
/**
 * Bend-holding statics of a pressurized beam whose bend is pinned by a hook-and-loop
 * fastener, plus the linear stiffness and deflection models measured on locked and
 * unlocked beams.
 *
 * Units: pressure kPa (gauge), lengths mm, tension N, torque N*m, stress kPa.
 */

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace vinelock {

struct FastenerParams {
  double width = 25.0;         // w, mm
  double thickness = 3.0;      // t, mm
  double sigma_star = 50.0;    // pure-normal separation stress, kPa
  double tau_star = 50.0;      // pure-shear separation stress, kPa
  double pinch_offset = 5.0;   // d, mm
  bool calibrated = false;     // false until produced by calibrate_fastener
};

struct StiffnessParams {
  double k_unlocked = 152.0;  // N/m
  double k_locked = 199.0;    // N/m
  double s_unlocked = 9.0;    // deg/N
  double s_locked = 1.0;      // deg/N
  double t_full = 10.0;       // N, tension at which every stopper is in contact
};

enum class Regime { Unlocked, Locked };

struct CalibrationSample {
  double theta = 0.0;  // rad
  double p_sep = 0.0;  // kPa
};

struct CalibrationOptions {
  std::size_t max_iterations = 500;
  double step_tolerance = 1e-10;
};

struct CalibrationResult {
  FastenerParams params;
  double rmse_kpa = 0.0;
  std::size_t iterations = 0;
  bool converged = false;  // false: iteration budget exhausted, params are best-so-far
};

void validate(const FastenerParams& f);
void validate(const StiffnessParams& s);

/// Stressed fastener area 8*w*t in m^2.
double fastener_area_m2(const FastenerParams& f) noexcept;

/// Magnitude of the straightening torque pi r^3 P (tan^2(theta/2) + 1), in N*m.
double resistance_torque(double pressure_kpa, double r_mm, double theta);

/// Direction of the fastener tension, (pi - theta) / 2.
double fastener_angle(double theta);

/// Largest tension (N) the fastener carries at bend angle theta before the elliptical
/// normal/shear criterion is violated.
double max_fastener_tension(double theta, const FastenerParams& f);

/// Net torque about the bend's center of rotation (N*m); zero at the separation onset.
double moment_residual(double pressure_kpa, double tension_n, double theta, double r_mm,
                       double pinch_offset_mm);

/// Minimum gauge pressure (kPa) that separates the fastener holding a bend of angle theta.
/// Defined for theta in the open interval (0, pi).
double separation_pressure(double theta, double r_mm, const FastenerParams& f);

/// Change in tip angle (deg) under cable tension. The unlocked response saturates at
/// `unlocked_cap_deg`, typically the full-contraction bend of the unlocked window.
double tip_deflection(double tension_n, Regime regime, const StiffnessParams& s,
                      double unlocked_cap_deg = std::numeric_limits<double>::infinity());

/// Linear tip load (N) for a tip displacement in metres.
double beam_tip_force(double displacement_m, Regime regime, const StiffnessParams& s);

/// Least-squares fit of sigma*, tau* (and optionally the pinch offset d) to measured
/// separation pressures. Gauss-Newton on log-parameters with a coordinate-descent fallback.
CalibrationResult calibrate_fastener(std::span<const CalibrationSample> samples, double r_mm,
                                     const FastenerParams& init, bool fit_pinch_offset,
                                     const CalibrationOptions& options = {});

/// Root-mean-square pressure residual (kPa) of `f` against `samples`.
double calibration_rmse(std::span<const CalibrationSample> samples, double r_mm,
                        const FastenerParams& f);

}  // namespace vinelock
