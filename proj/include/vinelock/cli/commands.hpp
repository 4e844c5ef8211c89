#pragma once
// Subcommand implementations behind the `vinelock` executable. Each returns a process
// exit status and writes human output to `out`, diagnostics to `err`.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "vinelock/error.hpp"
#include "vinelock/planner.hpp"
#include "vinelock/statics.hpp"

namespace vinelock::cli {

enum ExitCode : int {
  kOk = 0,
  kRuntime = 1,              // simulation/session failures
  kUsage = 2,                // schema, usage and invalid-input errors
  kInsufficientSamples = 3,
  kUnreachableTolerance = 4,
  kInfeasible = 5,           // curvature below the minimum radius, length budget
  kIo = 6,
  kDomain = 7,
};

int exit_code_for(ErrorCode code) noexcept;

/// Design from a JSON file, or the defaults when `path` is empty.
DesignParams load_design(const std::string& path);

struct SimulateArgs {
  std::string scenario_path;
  std::string out_dir = ".";
  std::optional<bool> disturbance;  // overrides the scenario option
};
int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);

struct PlanArgs {
  std::string target_path;
  std::string design_path;
  double tol_mm = 5.0;
  std::string out_path = "plan.json";
  double pressure_kpa = 7.0;
  TensionMode mode = TensionMode::Proportional;
};
int cmd_plan(const PlanArgs& args, std::ostream& out, std::ostream& err);

struct PressureCurveArgs {
  std::string design_path;
  std::optional<double> radius_mm;  // default: design beam radius
  std::optional<double> theta;      // single angle instead of a sweep
  double theta_min = 0.1;
  double theta_max = 3.0;
  int points = 100;
  std::optional<double> sigma_star, tau_star, pinch_offset, width, thickness;
  std::string out_path;  // empty: standard output
};
int cmd_models_pressure_curve(const PressureCurveArgs& args, std::ostream& out, std::ostream& err);

struct StiffnessArgs {
  std::string design_path;
  double max_displacement_m = 0.1;
  double max_tension_n = 10.0;
  int points = 11;
  std::string out_path;
};
int cmd_models_stiffness(const StiffnessArgs& args, std::ostream& out, std::ostream& err);

struct CalibrateArgs {
  std::string samples_path;
  std::string design_path;
  std::optional<double> radius_mm;
  bool fit_d = false;
  std::string out_design_path;  // empty: do not write
};
int cmd_calibrate(const CalibrateArgs& args, std::ostream& out, std::ostream& err);

struct EvaluateArgs {
  std::string deployed_path;
  std::string desired_path;
  std::size_t n = 100;
};
int cmd_evaluate(const EvaluateArgs& args, std::ostream& out, std::ostream& err);

enum class Transport { Tcp, WebSocket, Stdio };

struct ServeArgs {
  std::string design_path;
  double pressure_kpa = 7.0;
  bool disturbance = false;
  Transport transport = Transport::Tcp;
  std::string host = "127.0.0.1";
  std::uint16_t port = 8765;
};
int cmd_serve(const ServeArgs& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace vinelock::cli
