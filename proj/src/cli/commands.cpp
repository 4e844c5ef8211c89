#include "vinelock/cli/commands.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <cmath>
#include <filesystem>
#include <iostream>

#include "vinelock/cli/server.hpp"
#include "vinelock/io/json_codec.hpp"
#include "vinelock/io/protocol.hpp"
#include "vinelock/io/scenario.hpp"
#include "vinelock/io/tabular.hpp"
#include "vinelock/sim.hpp"

namespace vinelock::cli {

namespace {

using io::format_number;
using io::Json;

// Runs `body`, mapping library errors to exit codes with a one-line diagnostic.
template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const UnreachableToleranceError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kUnreachableTolerance;
  } catch (const Error& e) {
    fmt::print(err, "error [{}]: {}\n", to_string(e.code()), e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kRuntime;
  }
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    io::write_text_file(path, text);
  }
}

void note_uncalibrated(const FastenerParams& f, std::ostream& err) {
  if (!f.calibrated) {
    fmt::print(err, "note: fastener parameters are uncalibrated defaults "
                    "(run `vinelock calibrate` to fit them)\n");
  }
}

std::size_t primitive_count(const VineState& s) {
  return s.locked.size() + (s.unlocked_len > 0.0 ? 1 : 0);
}

}  // namespace

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Schema:
    case ErrorCode::DegenerateSpec:
    case ErrorCode::InvalidDesign:
    case ErrorCode::InvalidPolyline:
    case ErrorCode::Precondition:
      return kUsage;
    case ErrorCode::InsufficientSamples: return kInsufficientSamples;
    case ErrorCode::UnreachableTolerance: return kUnreachableTolerance;
    case ErrorCode::InfeasibleCurvature:
    case ErrorCode::LengthBudget:
      return kInfeasible;
    case ErrorCode::Io: return kIo;
    case ErrorCode::Domain: return kDomain;
    case ErrorCode::SessionFinished: return kRuntime;
  }
  return kRuntime;
}

DesignParams load_design(const std::string& path) {
  if (path.empty()) return DesignParams{};
  DesignParams d = io::design_from_json(io::read_json_file(path));
  validate(d);
  return d;
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    io::Scenario sc = io::scenario_from_json(io::read_json_file(args.scenario_path));
    if (args.disturbance) sc.options.disturbance = *args.disturbance;

    std::vector<Command> commands;
    Pose base = sc.options.base.value_or(Pose{});
    const Polyline* target = nullptr;
    Polyline target_overlay;
    if (const auto* cmds = std::get_if<std::vector<Command>>(&sc.source)) {
      commands = *cmds;
    } else if (const auto* plan = std::get_if<Plan>(&sc.source)) {
      commands = plan->steps;
      if (!sc.options.base) base = plan->base;
      if (!plan->predicted_shape.empty()) {
        target_overlay = forward_kinematics(plan->predicted_shape, base, sc.options.samples_per_mm);
        target = &target_overlay;
      }
    } else {
      target_overlay = std::get<Polyline>(sc.source);
      target = &target_overlay;
      const FitReport fit = fit_shape(target_overlay, sc.design, sc.options.tol_mm);
      if (!sc.options.base) base = fit.base;
      const Plan fitted = plan_from_shape(fit.shape, sc.design, sc.pressure,
                                          {sc.options.tension_mode, base});
      for (const auto& w : fitted.warnings) fmt::print(err, "warning: {}\n", w.message);
      commands = fitted.steps;
    }

    std::filesystem::create_directories(args.out_dir);
    const auto path = [&](const char* name) {
      return (std::filesystem::path(args.out_dir) / name).string();
    };

    VineState state = new_session(sc.design, sc.pressure, {sc.options.disturbance});
    std::string trace;
    int status = kOk;
    std::size_t event_count = 0;
    for (std::size_t i = 0; i < commands.size(); ++i) {
      std::vector<Event> events;
      try {
        events = apply_in_place(state, commands[i]);
      } catch (const Error& e) {
        fmt::print(err, "error [{}] at command {}: {}\n", to_string(e.code()), i + 1, e.what());
        status = exit_code_for(e.code());
        break;
      }
      event_count += events.size();
      const Json line = {{"seq", i + 1},
                         {"cmd", io::to_json(commands[i])},
                         {"everted_len", state.everted_len},
                         {"primitive_count", primitive_count(state)},
                         {"events", io::to_json(events)}};
      trace += line.dump() + "\n";
    }

    const Snapshot snap = snapshot(state, base, sc.options.samples_per_mm);
    io::write_text_file(path("trace.jsonl"), trace);
    io::write_text_file(path("centerline.csv"), io::centerline_csv(snap));
    io::write_text_file(path("deploy.svg"), io::deploy_svg(snap, sc.design, target));
    fmt::print(out, "commands {}\neverted_len_mm {}\nprimitive_count {}\nevents {}\n",
               commands.size(), format_number(state.everted_len), primitive_count(state),
               event_count);
    return status;
  });
}

int cmd_plan(const PlanArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const DesignParams design = load_design(args.design_path);
    const Polyline target = io::read_waypoints(args.target_path);
    FitReport fit;
    try {
      fit = fit_shape(target, design, args.tol_mm);
    } catch (const UnreachableToleranceError& e) {
      fmt::print(out, "best_residual_mm {}\nbest_primitive_count {}\n",
                 format_number(e.best_residual_mm()), e.best_primitive_count());
      throw;
    }
    const Plan plan = plan_from_shape(fit.shape, design, args.pressure_kpa, {args.mode, fit.base});
    for (const auto& w : plan.warnings) fmt::print(err, "warning: {}\n", w.message);
    io::write_text_file(args.out_path, io::to_json(plan).dump(2) + "\n");
    fmt::print(out, "residual_mm {}\nprimitive_count {}\ngrowth_mm {}\n",
               format_number(fit.residual), fit.primitive_count, format_number(plan.total_growth));
    return kOk;
  });
}

int cmd_models_pressure_curve(const PressureCurveArgs& args, std::ostream& out,
                              std::ostream& err) {
  return guarded(err, [&] {
    const DesignParams design = load_design(args.design_path);
    FastenerParams f = design.fastener;
    if (args.sigma_star) f.sigma_star = *args.sigma_star;
    if (args.tau_star) f.tau_star = *args.tau_star;
    if (args.pinch_offset) f.pinch_offset = *args.pinch_offset;
    if (args.width) f.width = *args.width;
    if (args.thickness) f.thickness = *args.thickness;
    validate(f);
    const double r = args.radius_mm.value_or(design.beam_radius);
    if (!(r > 0.0)) throw Error(ErrorCode::Domain, "radius must be positive");

    std::vector<double> thetas;
    if (args.theta) {
      thetas.push_back(*args.theta);
    } else {
      if (args.points < 2) throw Error(ErrorCode::Precondition, "a sweep needs at least 2 points");
      for (int i = 0; i < args.points; ++i) {
        thetas.push_back(args.theta_min +
                         (args.theta_max - args.theta_min) * i / (args.points - 1));
      }
    }
    std::string csv = "theta_rad,p_min_kpa\n";
    for (const double th : thetas) {
      csv += format_number(th) + "," + format_number(separation_pressure(th, r, f)) + "\n";
    }
    note_uncalibrated(f, err);
    emit(args.out_path, csv, out);
    return kOk;
  });
}

int cmd_models_stiffness(const StiffnessArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const DesignParams design = load_design(args.design_path);
    if (args.points < 2) throw Error(ErrorCode::Precondition, "a sweep needs at least 2 points");
    if (!(args.max_displacement_m >= 0.0) || !(args.max_tension_n >= 0.0)) {
      throw Error(ErrorCode::Domain, "sweep limits must be non-negative");
    }
    const auto& s = design.stiffness;
    const double cap = unlocked_window_cap_deg(design);
    std::string csv =
        "displacement_m,force_unlocked_n,force_locked_n,tension_n,dtheta_unlocked_deg,"
        "dtheta_locked_deg\n";
    for (int i = 0; i < args.points; ++i) {
      const double u = static_cast<double>(i) / (args.points - 1);
      const double x = args.max_displacement_m * u;
      const double t = args.max_tension_n * u;
      csv += fmt::format("{},{},{},{},{},{}\n", format_number(x),
                         format_number(beam_tip_force(x, Regime::Unlocked, s)),
                         format_number(beam_tip_force(x, Regime::Locked, s)), format_number(t),
                         format_number(tip_deflection(t, Regime::Unlocked, s, cap)),
                         format_number(tip_deflection(t, Regime::Locked, s)));
    }
    emit(args.out_path, csv, out);
    return kOk;
  });
}

int cmd_calibrate(const CalibrateArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    DesignParams design = load_design(args.design_path);
    const auto samples = io::parse_samples_csv(io::read_text_file(args.samples_path));
    const double r = args.radius_mm.value_or(design.beam_radius);
    const CalibrationResult res = calibrate_fastener(samples, r, design.fastener, args.fit_d);
    if (!res.converged) {
      fmt::print(err, "warning: calibration did not converge in {} iterations; "
                      "reporting the best parameters found\n", res.iterations);
    }
    fmt::print(out, "sigma_star_kpa {}\ntau_star_kpa {}\npinch_offset_mm {}\nrmse_kpa {}\n"
                    "iterations {}\nconverged {}\n",
               format_number(res.params.sigma_star), format_number(res.params.tau_star),
               format_number(res.params.pinch_offset), format_number(res.rmse_kpa),
               res.iterations, res.converged);
    if (!args.out_design_path.empty()) {
      design.fastener = res.params;
      io::write_text_file(args.out_design_path, io::to_json(design).dump(2) + "\n");
    }
    return kOk;
  });
}

int cmd_evaluate(const EvaluateArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Polyline deployed = io::parse_polyline_csv(io::read_text_file(args.deployed_path));
    const Polyline desired = io::parse_polyline_csv(io::read_text_file(args.desired_path));
    const double e = mean_config_error(deployed, desired, args.n);
    fmt::print(out, "{}\n", format_number(e));
    return kOk;
  });
}

int cmd_serve(const ServeArgs& args, std::istream& in, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    io::ProtocolConfig config;
    config.design = load_design(args.design_path);
    config.pressure = args.pressure_kpa;
    config.options.disturbance = args.disturbance;
    // Reject a bad pressure up front rather than on every connection.
    (void)new_session(config.design, config.pressure, config.options);
    if (args.transport == Transport::Stdio) {
      serve_stream(config, in, out);
      return kOk;
    }
    LineServer server(config, args.transport, args.host, args.port);
    fmt::print(err, "listening on {}:{} ({})\n", args.host, server.port(),
               args.transport == Transport::Tcp ? "tcp" : "websocket");
    err.flush();
    server.run();
    return kOk;
  });
}

}  // namespace vinelock::cli
