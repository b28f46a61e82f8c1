#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "ddvf/cli.hpp"
#include "ddvf/coupling.hpp"
#include "ddvf/io.hpp"
#include "ddvf/verification.hpp"

namespace py = pybind11;
using namespace ddvf;

namespace {

SimulationConfig config_from(const std::string& text) { return parse_config(text).config; }

py::dict bounds_dict(const BoundsReport& b) {
    py::dict d;
    d["field"] = b.field;
    d["min"] = b.min;
    d["max"] = b.max;
    d["below_count"] = b.below_count;
    d["above_count"] = b.above_count;
    d["below_node_fraction"] = b.below_node_fraction;
    d["above_node_fraction"] = b.above_node_fraction;
    d["below_area_fraction"] = b.below_area_fraction;
    d["above_area_fraction"] = b.above_area_fraction;
    d["clamp_events"] = b.clamp_events;
    return d;
}

py::dict verification_dict(const VerificationResult& r) {
    py::dict d;
    d["name"] = r.name;
    d["passed"] = r.passed;
    d["value"] = r.value;
    d["threshold"] = r.threshold;
    d["detail"] = r.detail;
    return d;
}

py::dict diagnostics_dict(const DiagnosticsSeries& series) {
    std::vector<double> t, c_min, c_max, below, above, th_min, th_max, iface, balance;
    for (const auto& r : series.records()) {
        t.push_back(r.time);
        c_min.push_back(r.c.min);
        c_max.push_back(r.c.max);
        below.push_back(r.c.below_area_fraction);
        above.push_back(r.c.above_area_fraction);
        th_min.push_back(r.theta.min);
        th_max.push_back(r.theta.max);
        iface.push_back(r.interface_length);
        balance.push_back(r.balance_residual);
    }
    py::dict d;
    d["t"] = t;
    d["c_min"] = c_min;
    d["c_max"] = c_max;
    d["frac_below"] = below;
    d["frac_above"] = above;
    d["theta_min"] = th_min;
    d["theta_max"] = th_max;
    d["interface_len"] = iface;
    d["balance_res"] = balance;
    return d;
}

ScalarField field_from(const StructuredQuadMesh& mesh, const Eigen::VectorXd& values) {
    if (values.size() != static_cast<Eigen::Index>(mesh.num_q4_nodes())) {
        throw InvalidArgument("field length does not match the mesh node count");
    }
    return {values, 0.0};
}

} // namespace

PYBIND11_MODULE(_ddvf, m) {
    m.doc() = "Double-diffusive viscous fingering simulator";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

    py::enum_<SubdomainTag>(m, "SubdomainTag")
        .value("Interior", SubdomainTag::Interior)
        .value("Injection", SubdomainTag::Injection)
        .value("Production", SubdomainTag::Production);

    py::class_<StructuredQuadMesh>(m, "Mesh")
        .def(py::init<int, int, double, double>(), py::arg("nx"), py::arg("ny"), py::arg("length") = 1.0,
             py::arg("well_width") = 0.1)
        .def_property_readonly("nx", &StructuredQuadMesh::nx)
        .def_property_readonly("ny", &StructuredQuadMesh::ny)
        .def_property_readonly("num_elements", &StructuredQuadMesh::num_elements)
        .def_property_readonly("num_q4_nodes", &StructuredQuadMesh::num_q4_nodes)
        .def_property_readonly("num_q9_nodes", &StructuredQuadMesh::num_q9_nodes)
        .def_property_readonly("corner_nodes", &StructuredQuadMesh::corner_nodes)
        .def_property_readonly("tags", &StructuredQuadMesh::tags)
        .def_property_readonly("warnings", &StructuredQuadMesh::warnings)
        .def("h_elem", &StructuredQuadMesh::h_elem);

    m.def("upwind_xi", &upwind_xi, py::arg("chi"));
    m.def("element_peclet", &element_peclet, py::arg("h"), py::arg("speed"), py::arg("lambda_min"));
    m.def("compute_tau", &compute_tau, py::arg("v"), py::arg("h"), py::arg("lambda_min"));
    m.def("sold_parallel_velocity", &sold_parallel_velocity, py::arg("v"), py::arg("grad_c"), py::arg("eps_g") = 1e-10);
    m.def("tau_iso", &tau_iso, py::arg("v"), py::arg("v_par"), py::arg("h"), py::arg("lambda_min"));
    m.def("crosswind_projector", &crosswind_projector, py::arg("v"));
    m.def("tau_crosswind", &tau_crosswind, py::arg("v"), py::arg("h"), py::arg("lambda_min"));
    m.def(
        "viscosity",
        [](double c, double theta, double mu0, double r_c, double r_theta) {
            return viscosity(c, theta, ViscosityLaw{mu0, r_c, r_theta});
        },
        py::arg("c"), py::arg("theta"), py::arg("mu0") = 1.0, py::arg("r_c") = 2.0, py::arg("r_theta") = 2.0);

    m.def(
        "interface_length",
        [](const StructuredQuadMesh& mesh, const Eigen::VectorXd& values, double level) {
            return interface_length(mesh, field_from(mesh, values), level);
        },
        py::arg("mesh"), py::arg("values"), py::arg("level") = 0.5);
    m.def(
        "bounds_report",
        [](const StructuredQuadMesh& mesh, const Eigen::VectorXd& values, double lower, double upper, double tol) {
            return bounds_dict(bounds_report(mesh, field_from(mesh, values), lower, upper, tol));
        },
        py::arg("mesh"), py::arg("values"), py::arg("lower") = 0.0, py::arg("upper") = 1.0, py::arg("tol") = 1e-8);

    m.def(
        "normalize_config", [](const std::string& text) { return format_config(config_from(text)); },
        py::arg("text") = "", "Parse, validate and re-render a configuration document.");

    py::class_<SimulationState>(m, "State")
        .def_readonly("time", &SimulationState::time)
        .def_readonly("step", &SimulationState::step)
        .def_property_readonly("c", [](const SimulationState& s) { return s.c.values; })
        .def_property_readonly("theta", [](const SimulationState& s) { return s.theta.values; })
        .def_property_readonly("pressure", [](const SimulationState& s) { return s.flow.pressure; })
        .def_property_readonly("velocity", [](const SimulationState& s) { return s.flow.velocity; });

    py::class_<CoupledSimulation>(m, "Simulation")
        .def(py::init([](const std::string& text) { return std::make_unique<CoupledSimulation>(config_from(text)); }),
             py::arg("config") = "")
        .def_property_readonly("mesh", &CoupledSimulation::mesh, py::return_value_policy::reference_internal)
        .def_property_readonly("config", [](const CoupledSimulation& s) { return format_config(s.config()); })
        .def("initialize", &CoupledSimulation::initialize)
        .def("advance", &CoupledSimulation::advance_step, py::arg("state"))
        .def(
            "diagnose",
            [](const CoupledSimulation& s, const SimulationState& state, const SimulationState* previous) {
                const DiagnosticsRecord r = s.diagnose(state, previous);
                py::dict d;
                d["t"] = r.time;
                d["c"] = bounds_dict(r.c);
                d["theta"] = bounds_dict(r.theta);
                d["interface_len"] = r.interface_length;
                d["balance_res"] = r.balance_residual;
                return d;
            },
            py::arg("state"), py::arg("previous") = nullptr)
        .def("run", [](CoupledSimulation& s) {
            RunResult r;
            {
                py::gil_scoped_release release;
                r = s.run();
            }
            py::dict d;
            d["steps"] = r.steps;
            d["diagnostics"] = diagnostics_dict(r.diagnostics);
            d["final_state"] = r.final_state;
            return d;
        });

    m.def("flow_patch_test", [] { return verification_dict(flow_patch_test()); });
    m.def("verify", [] {
        py::list out;
        for (const auto& r : run_verification_suite()) out.append(verification_dict(r));
        return out;
    });
    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::vector<const char*> argv = {"ddvf"};
            for (const auto& a : args) argv.push_back(a.c_str());
            std::ostringstream out, err;
            const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Run the command-line driver; returns (exit_code, stdout, stderr).");
}
