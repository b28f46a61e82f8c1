#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>

#include "ddvf/diagnostics.hpp"
#include "ddvf/errors.hpp"
#include "ddvf/fields.hpp"
#include "ddvf/flow.hpp"
#include "ddvf/mesh.hpp"
#include "ddvf/transport.hpp"

namespace ddvf {

struct MeshParams {
    int nx = 100;
    int ny = 100;
    double length = 1.0;
    double well_width = 0.1;
    bool operator==(const MeshParams&) const = default;
};

struct FlowParams {
    double permeability = 1.0;
    double mu0 = 1.0;
    double r_c = 2.0;
    double r_theta = 2.0;
    double perturbation = 0.0;  // delta in k (1 + delta r)
    std::uint64_t seed = 0;
    bool operator==(const FlowParams&) const = default;
};

struct TransportParams {
    double d_m = 1e-7;
    double phi_injection = 0.1;
    double phi_production = 0.1;
    double c0 = 0.0;
    std::string c0_file;  // snapshot CSV; overrides c0 when set
    bool operator==(const TransportParams&) const = default;
};

struct ThermalParams {
    double kappa_theta = 1e-5;
    double theta0 = 0.0;
    std::string theta0_file;
    bool operator==(const ThermalParams&) const = default;
};

struct TimeParams {
    double dt = 0.5;
    double t_end = 250.0;
    int snapshot_every = 50;
    bool operator==(const TimeParams&) const = default;
};

struct StabilizationParams {
    StabilizationScheme scheme = StabilizationScheme::Supg;
    double gradient_threshold = 1e-10;
    bool sold_iteration = false;
    int sold_max_iterations = 10;
    double sold_tolerance = 1e-6;
    bool picard = false;
    int picard_max_iterations = 10;
    double picard_tolerance = 1e-6;
    bool operator==(const StabilizationParams&) const = default;
};

struct OutputParams {
    bool vtk = false;
    double bounds_tol = 1e-8;
    double interface_level = 0.5;
    bool operator==(const OutputParams&) const = default;
};

struct SimulationConfig {
    MeshParams mesh;
    FlowParams flow;
    TransportParams transport;
    ThermalParams thermal;
    TimeParams time;
    StabilizationParams stabilization;
    OutputParams output;
    bool operator==(const SimulationConfig&) const = default;
};

/// Throws ValidationError naming every offending "section.key".
void validate(const SimulationConfig& config);

struct SimulationState {
    double time = 0.0;
    int step = 0;
    ScalarField c;
    ScalarField theta;
    FlowSolution flow;
};

/// A nodal value became non-finite. Carries the offending state so callers
/// can write a diagnostic snapshot.
class DivergenceError : public SolverError {
public:
    DivergenceError(const std::string& what, SimulationState state)
        : SolverError(what), state_(std::move(state)) {}
    [[nodiscard]] const SimulationState& state() const noexcept { return state_; }

private:
    SimulationState state_;
};

struct OutputSinks {
    std::function<void(const SimulationState&)> snapshot;
    std::function<void(const DiagnosticsRecord&)> diagnostics;
};

struct RunResult {
    SimulationState final_state;
    DiagnosticsSeries diagnostics;
    int steps = 0;
};

/// Quarter five-spot problem definitions for a configuration.
FlowProblem make_flow_problem(const StructuredQuadMesh& mesh, const SimulationConfig& config);
TransportProblem make_concentration_problem(const StructuredQuadMesh& mesh, const SimulationConfig& config);
TransportProblem make_thermal_problem(const StructuredQuadMesh& mesh, const SimulationConfig& config);

/// Number of steps needed to reach t_end with step dt.
int step_count(double t_end, double dt);

/// Coupled flow / concentration / temperature time loop. Per step: flow with
/// mu(c^n, theta^n), then c with the configured scheme, then theta with
/// SUPG, optionally repeated as a Picard sweep.
class CoupledSimulation {
public:
    explicit CoupledSimulation(SimulationConfig config);

    [[nodiscard]] const SimulationConfig& config() const noexcept { return config_; }
    [[nodiscard]] const StructuredQuadMesh& mesh() const noexcept { return mesh_; }
    [[nodiscard]] const FlowProblem& flow_problem() const noexcept { return flow_problem_; }
    [[nodiscard]] const TransportProblem& concentration_problem() const noexcept { return c_problem_; }
    [[nodiscard]] const TransportProblem& thermal_problem() const noexcept { return theta_problem_; }

    void set_viscosity_observer(ViscosityObserver observer) { flow_problem_.observer = std::move(observer); }

    SimulationState initialize();
    SimulationState advance_step(const SimulationState& state);
    DiagnosticsRecord diagnose(const SimulationState& state, const SimulationState* previous) const;
    RunResult run(const OutputSinks& sinks = {});

private:
    SimulationConfig config_;
    StructuredQuadMesh mesh_;
    FlowProblem flow_problem_;
    TransportProblem c_problem_;
    TransportProblem theta_problem_;
    FlowSolver flow_solver_;
    TransportSolver c_solver_;
    TransportSolver theta_solver_;
};

SimulationState initialize(const SimulationConfig& config);
SimulationState advance_step(const SimulationState& state, const SimulationConfig& config);
RunResult run(const SimulationConfig& config, const OutputSinks& sinks = {});

} // namespace ddvf
