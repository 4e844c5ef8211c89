#include "vinelock/statics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vinelock/error.hpp"

namespace vinelock {

namespace {
constexpr double kPi = std::numbers::pi;
}

void validate(const FastenerParams& f) {
  if (!(f.width > 0.0) || !(f.thickness > 0.0)) {
    throw Error(ErrorCode::Precondition, "fastener width and thickness must be positive");
  }
  if (!(f.sigma_star > 0.0) || !(f.tau_star > 0.0)) {
    throw Error(ErrorCode::Precondition, "fastener separation stresses must be positive");
  }
  if (!(f.pinch_offset >= 0.0)) {
    throw Error(ErrorCode::Precondition, "pinch offset must be non-negative");
  }
}

void validate(const StiffnessParams& s) {
  if (!(s.k_unlocked > 0.0) || !(s.k_locked > s.k_unlocked)) {
    throw Error(ErrorCode::Precondition, "stiffness requires k_locked > k_unlocked > 0");
  }
  if (!(s.s_locked > 0.0) || !(s.s_unlocked > s.s_locked)) {
    throw Error(ErrorCode::Precondition, "deflection slopes require s_unlocked > s_locked > 0");
  }
  if (!(s.t_full > 0.0)) throw Error(ErrorCode::Precondition, "t_full must be positive");
}

double fastener_area_m2(const FastenerParams& f) noexcept {
  return 8.0 * (f.width * 1e-3) * (f.thickness * 1e-3);
}

double resistance_torque(double pressure_kpa, double r_mm, double theta) {
  if (!(pressure_kpa >= 0.0)) throw Error(ErrorCode::Precondition, "pressure must be >= 0");
  if (!(r_mm > 0.0)) throw Error(ErrorCode::Precondition, "beam radius must be positive");
  if (!(theta >= 0.0)) throw Error(ErrorCode::Precondition, "bend angle must be >= 0");
  if (!(theta < kPi)) throw Error(ErrorCode::Domain, "resistance torque diverges at theta >= pi");
  const double r = r_mm * 1e-3;
  const double t = std::tan(0.5 * theta);
  return kPi * r * r * r * (pressure_kpa * 1e3) * (t * t + 1.0);
}

double fastener_angle(double theta) {
  if (!(theta >= 0.0 && theta <= kPi)) {
    throw Error(ErrorCode::Precondition, "bend angle must lie in [0, pi]");
  }
  return 0.5 * (kPi - theta);
}

double max_fastener_tension(double theta, const FastenerParams& f) {
  validate(f);
  const double alpha = fastener_angle(theta);
  const double sn = std::sin(alpha) / f.sigma_star;
  const double ss = std::cos(alpha) / f.tau_star;
  // stresses in kPa, area in m^2
  return fastener_area_m2(f) * 1e3 / std::sqrt(sn * sn + ss * ss);
}

double moment_residual(double pressure_kpa, double tension_n, double theta, double r_mm,
                       double pinch_offset_mm) {
  const double alpha = fastener_angle(theta);
  const double r = r_mm * 1e-3;
  const double d = pinch_offset_mm * 1e-3;
  return resistance_torque(pressure_kpa, r_mm, theta) - r * tension_n * std::cos(alpha) -
         (r / std::tan(0.5 * theta) + d) * tension_n * std::sin(alpha);
}

double separation_pressure(double theta, double r_mm, const FastenerParams& f) {
  if (!(theta > 0.0 && theta < kPi)) {
    throw Error(ErrorCode::Domain, "separation pressure is defined for theta in (0, pi)");
  }
  if (!(r_mm > 0.0)) throw Error(ErrorCode::Precondition, "beam radius must be positive");
  const double tension = max_fastener_tension(theta, f);
  const double alpha = fastener_angle(theta);
  const double r = r_mm * 1e-3;
  const double d = f.pinch_offset * 1e-3;
  const double t = std::tan(0.5 * theta);
  const double lever = r * std::cos(alpha) + (r / t + d) * std::sin(alpha);
  const double pa = tension * lever / (kPi * r * r * r * (t * t + 1.0));
  return pa * 1e-3;
}

double tip_deflection(double tension_n, Regime regime, const StiffnessParams& s,
                      double unlocked_cap_deg) {
  if (!(tension_n >= 0.0)) throw Error(ErrorCode::Precondition, "tension must be >= 0");
  if (regime == Regime::Locked) return s.s_locked * tension_n;
  return std::min(s.s_unlocked * tension_n, unlocked_cap_deg);
}

double beam_tip_force(double displacement_m, Regime regime, const StiffnessParams& s) {
  if (!(displacement_m >= 0.0)) throw Error(ErrorCode::Precondition, "displacement must be >= 0");
  return (regime == Regime::Locked ? s.k_locked : s.k_unlocked) * displacement_m;
}

}  // namespace vinelock
