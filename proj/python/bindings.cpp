#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "vinelock/error.hpp"
#include "vinelock/io/json_codec.hpp"
#include "vinelock/io/protocol.hpp"
#include "vinelock/kinematics.hpp"
#include "vinelock/planner.hpp"
#include "vinelock/sim.hpp"
#include "vinelock/statics.hpp"

namespace py = pybind11;
using namespace vinelock;
using io::Json;

namespace {

// Structured values cross the boundary as JSON text in the CLI file schemas.
DesignParams design_arg(const std::string& text) {
  if (text.empty()) return DesignParams{};
  DesignParams d = io::design_from_json(io::parse_json(text));
  validate(d);
  return d;
}

Polyline polyline_arg(const std::vector<std::pair<double, double>>& pts) {
  Polyline p;
  for (const auto& [x, y] : pts) p.points.push_back({x, y});
  return p;
}

std::vector<std::pair<double, double>> points_out(const Polyline& p) {
  std::vector<std::pair<double, double>> out;
  out.reserve(p.points.size());
  for (const auto& q : p.points) out.emplace_back(q.x, q.y);
  return out;
}

TensionMode mode_arg(const std::string& mode) {
  if (mode == "proportional") return TensionMode::Proportional;
  if (mode == "binary") return TensionMode::Binary;
  throw Error(ErrorCode::Precondition, "tension mode must be \"proportional\" or \"binary\"");
}

}  // namespace

PYBIND11_MODULE(_vinelock, m) {
  m.doc() = "Kinematics, statics, simulation and planning for shape-locking vine robots";

  py::register_exception<Error>(m, "VinelockError", PyExc_ValueError);

  m.def("contraction_ratio",
        [](double stopper_len, double gap_len) {
          return contraction_ratio(StopperSpec{stopper_len, gap_len});
        },
        py::arg("stopper_len") = 19.0, py::arg("gap_len") = 19.0);
  m.def("min_bend_radius", py::overload_cast<double, double>(&min_bend_radius), py::arg("r"),
        py::arg("a"));
  m.def("bend_angle_from_lengths", &bend_angle_from_lengths, py::arg("outer_len"),
        py::arg("contracted_len"), py::arg("r"));
  m.def("growth_for_bend", &growth_for_bend, py::arg("bend_radius"), py::arg("r"),
        py::arg("theta"));

  m.def("resistance_torque", &resistance_torque, py::arg("pressure_kpa"), py::arg("r_mm"),
        py::arg("theta"));
  m.def("separation_pressure",
        [](double theta, double r_mm, double sigma_star, double tau_star, double pinch_offset,
           double width, double thickness) {
          FastenerParams f{width, thickness, sigma_star, tau_star, pinch_offset};
          validate(f);
          return separation_pressure(theta, r_mm, f);
        },
        py::arg("theta"), py::arg("r_mm"), py::arg("sigma_star") = 50.0,
        py::arg("tau_star") = 50.0, py::arg("pinch_offset") = 5.0, py::arg("width") = 25.0,
        py::arg("thickness") = 3.0);
  m.def("beam_tip_force",
        [](double displacement_m, bool locked) {
          return beam_tip_force(displacement_m, locked ? Regime::Locked : Regime::Unlocked,
                                StiffnessParams{});
        },
        py::arg("displacement_m"), py::arg("locked"));
  m.def("tip_deflection",
        [](double tension_n, bool locked) {
          return tip_deflection(tension_n, locked ? Regime::Locked : Regime::Unlocked,
                                StiffnessParams{});
        },
        py::arg("tension_n"), py::arg("locked"));
  m.def("calibrate_fastener",
        [](const std::vector<std::pair<double, double>>& samples, double r_mm, bool fit_d) {
          std::vector<CalibrationSample> s;
          for (const auto& [theta, p] : samples) s.push_back({theta, p});
          const auto res = calibrate_fastener(s, r_mm, FastenerParams{}, fit_d);
          py::dict out;
          out["sigma_star"] = res.params.sigma_star;
          out["tau_star"] = res.params.tau_star;
          out["pinch_offset"] = res.params.pinch_offset;
          out["rmse_kpa"] = res.rmse_kpa;
          out["converged"] = res.converged;
          return out;
        },
        py::arg("samples"), py::arg("r_mm"), py::arg("fit_d") = false);

  m.def("mean_config_error",
        [](const std::vector<std::pair<double, double>>& deployed,
           const std::vector<std::pair<double, double>>& desired, std::size_t n) {
          return mean_config_error(polyline_arg(deployed), polyline_arg(desired), n);
        },
        py::arg("deployed"), py::arg("desired"), py::arg("n") = 100);
  m.def("forward_kinematics",
        [](const std::string& shape_json, double samples_per_mm) {
          return points_out(forward_kinematics(io::shape_from_json(io::parse_json(shape_json)),
                                               Pose{}, samples_per_mm));
        },
        py::arg("shape_json"), py::arg("samples_per_mm") = kDefaultSamplesPerMm);

  m.def("plan_from_shape",
        [](const std::string& shape_json, const std::string& design_json, double pressure_kpa,
           const std::string& mode) {
          const Shape shape = io::shape_from_json(io::parse_json(shape_json));
          return io::to_json(plan_from_shape(shape, design_arg(design_json), pressure_kpa,
                                             {mode_arg(mode), Pose{}}))
              .dump();
        },
        py::arg("shape_json"), py::arg("design_json") = "", py::arg("pressure_kpa") = 7.0,
        py::arg("mode") = "proportional");
  m.def("predict",
        [](const std::string& plan_json, const std::string& design_json, double samples_per_mm) {
          const Plan plan = io::plan_from_json(io::parse_json(plan_json));
          return points_out(predict(plan, design_arg(design_json), samples_per_mm));
        },
        py::arg("plan_json"), py::arg("design_json") = "",
        py::arg("samples_per_mm") = kDefaultSamplesPerMm);
  m.def("fit_shape",
        [](const std::vector<std::pair<double, double>>& waypoints, const std::string& design_json,
           double tol_mm) {
          return io::to_json(fit_shape(polyline_arg(waypoints), design_arg(design_json), tol_mm))
              .dump();
        },
        py::arg("waypoints"), py::arg("design_json") = "", py::arg("tol_mm") = 5.0);

  py::class_<io::ProtocolSession>(m, "Session")
      .def(py::init([](const std::string& design_json, double pressure_kpa, bool disturbance) {
             io::ProtocolConfig config;
             config.design = design_arg(design_json);
             config.pressure = pressure_kpa;
             config.options.disturbance = disturbance;
             return io::ProtocolSession(config);
           }),
           py::arg("design_json") = "", py::arg("pressure_kpa") = 7.0,
           py::arg("disturbance") = false)
      .def("handle_line", &io::ProtocolSession::handle_line, py::arg("line"));
}
