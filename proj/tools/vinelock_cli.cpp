// vinelock: simulate, plan, model and calibrate shape-locking vine robot deployments.

#include <CLI11.hpp>

#include <iostream>

#include "vinelock/cli/commands.hpp"

namespace {

std::optional<bool> parse_on_off(const std::string& s) {
  if (s == "on") return true;
  if (s == "off") return false;
  return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace vinelock::cli;
  CLI::App app{"Simulator, planner and calibration toolkit for shape-locking vine robots"};
  app.require_subcommand(1);

  SimulateArgs sim;
  std::string sim_disturbance;
  auto* simulate = app.add_subcommand("simulate", "Run a scenario and write trace.jsonl, centerline.csv, deploy.svg");
  simulate->add_option("scenario", sim.scenario_path, "Scenario JSON file")->required();
  simulate->add_option("--out", sim.out_dir, "Output directory")->capture_default_str();
  simulate->add_option("--disturbance", sim_disturbance, "Override locked-bend disturbance")
      ->check(CLI::IsMember({"on", "off"}));

  PlanArgs plan;
  std::string plan_mode = "proportional";
  auto* plan_cmd = app.add_subcommand("plan", "Fit a target path and write a command plan");
  plan_cmd->add_option("target", plan.target_path, "Waypoints: JSON [[x,y],...] or CSV x_mm,y_mm")
      ->required();
  plan_cmd->add_option("--design", plan.design_path, "Design JSON (defaults if omitted)");
  plan_cmd->add_option("--tol-mm", plan.tol_mm, "Fit tolerance, mean config error in mm")
      ->capture_default_str();
  plan_cmd->add_option("--out", plan.out_path, "Plan JSON output")->capture_default_str();
  plan_cmd->add_option("--pressure", plan.pressure_kpa, "Body pressure, kPa")->capture_default_str();
  plan_cmd->add_option("--tension-mode", plan_mode, "proportional or binary")
      ->check(CLI::IsMember({"proportional", "binary"}))
      ->capture_default_str();

  auto* models = app.add_subcommand("models", "Evaluate the statics models");
  models->require_subcommand(1);
  PressureCurveArgs curve;
  auto* pc = models->add_subcommand("pressure-curve", "CSV theta_rad,p_min_kpa");
  pc->add_option("--design", curve.design_path, "Design JSON (defaults if omitted)");
  pc->add_option("--radius-mm", curve.radius_mm, "Beam radius, default from design");
  pc->add_option("--theta", curve.theta, "Single angle in rad instead of a sweep");
  pc->add_option("--theta-min", curve.theta_min, "Sweep start, rad")->capture_default_str();
  pc->add_option("--theta-max", curve.theta_max, "Sweep end, rad")->capture_default_str();
  pc->add_option("--points", curve.points, "Sweep points")->capture_default_str();
  pc->add_option("--sigma-star", curve.sigma_star, "kPa");
  pc->add_option("--tau-star", curve.tau_star, "kPa");
  pc->add_option("--pinch-offset", curve.pinch_offset, "mm");
  pc->add_option("--width", curve.width, "Fastener width, mm");
  pc->add_option("--thickness", curve.thickness, "Fastener thickness, mm");
  pc->add_option("--out", curve.out_path, "CSV output (standard output if omitted)");
  StiffnessArgs stiff;
  auto* st = models->add_subcommand("stiffness", "Tip force and deflection models as CSV");
  st->add_option("--design", stiff.design_path, "Design JSON (defaults if omitted)");
  st->add_option("--max-displacement-m", stiff.max_displacement_m)->capture_default_str();
  st->add_option("--max-tension-n", stiff.max_tension_n)->capture_default_str();
  st->add_option("--points", stiff.points)->capture_default_str();
  st->add_option("--out", stiff.out_path, "CSV output (standard output if omitted)");

  CalibrateArgs cal;
  auto* calibrate = app.add_subcommand("calibrate", "Fit fastener strengths to separation data");
  calibrate->add_option("samples", cal.samples_path, "CSV theta_rad,p_sep_kpa")->required();
  calibrate->add_option("--design", cal.design_path, "Design JSON (defaults if omitted)");
  calibrate->add_option("--radius-mm", cal.radius_mm, "Beam radius of the test specimen");
  calibrate->add_flag("--fit-d", cal.fit_d, "Also fit the pinch offset d");
  calibrate->add_option("--out", cal.out_design_path, "Write the design with fitted parameters");

  EvaluateArgs eval;
  auto* evaluate = app.add_subcommand("evaluate", "Mean configuration error between two paths, mm");
  evaluate->add_option("deployed", eval.deployed_path, "CSV x_mm,y_mm")->required();
  evaluate->add_option("desired", eval.desired_path, "CSV x_mm,y_mm")->required();
  evaluate->add_option("--n", eval.n, "Resampled points per path")->capture_default_str();

  ServeArgs serve;
  std::string serve_disturbance = "off";
  std::string transport = "tcp";
  auto* serve_cmd = app.add_subcommand("serve", "Serve live sessions over newline-delimited JSON");
  serve_cmd->add_option("--design", serve.design_path, "Design JSON (defaults if omitted)");
  serve_cmd->add_option("--port", serve.port, "Port (0 picks a free one)")->capture_default_str();
  serve_cmd->add_option("--host", serve.host, "IPv4 address to bind")->capture_default_str();
  serve_cmd->add_option("--pressure", serve.pressure_kpa, "Initial pressure, kPa")
      ->capture_default_str();
  serve_cmd->add_option("--disturbance", serve_disturbance)
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
  serve_cmd->add_option("--transport", transport, "tcp, websocket or stdio")
      ->check(CLI::IsMember({"tcp", "websocket", "stdio"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (*simulate) {
    if (!sim_disturbance.empty()) sim.disturbance = parse_on_off(sim_disturbance);
    return cmd_simulate(sim, std::cout, std::cerr);
  }
  if (*plan_cmd) {
    plan.mode = plan_mode == "binary" ? vinelock::TensionMode::Binary
                                      : vinelock::TensionMode::Proportional;
    return cmd_plan(plan, std::cout, std::cerr);
  }
  if (*pc) return cmd_models_pressure_curve(curve, std::cout, std::cerr);
  if (*st) return cmd_models_stiffness(stiff, std::cout, std::cerr);
  if (*calibrate) return cmd_calibrate(cal, std::cout, std::cerr);
  if (*evaluate) return cmd_evaluate(eval, std::cout, std::cerr);
  if (*serve_cmd) {
    serve.disturbance = serve_disturbance == "on";
    serve.transport = transport == "stdio"       ? Transport::Stdio
                      : transport == "websocket" ? Transport::WebSocket
                                                 : Transport::Tcp;
    return cmd_serve(serve, std::cin, std::cout, std::cerr);
  }
  return kUsage;
}
