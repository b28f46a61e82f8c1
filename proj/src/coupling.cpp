#include "ddvf/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "ddvf/io.hpp"

namespace ddvf {

namespace {

double relative_change(const ScalarField& next, const ScalarField& prev) {
    const double scale = std::max(next.values.cwiseAbs().maxCoeff(), 1e-30);
    return (next.values - prev.values).cwiseAbs().maxCoeff() / scale;
}

ScalarField initial_field(const StructuredQuadMesh& mesh, double value, const std::string& file,
                          const std::string& column) {
    if (file.empty()) return constant_field(mesh, value);
    const SnapshotData snap = read_snapshot_csv_file(file);
    const std::vector<double>& src = column == "c" ? snap.c : snap.theta;
    if (src.size() != mesh.num_q4_nodes()) {
        throw ValidationError("initial condition file " + file + " has " + std::to_string(src.size()) +
                                  " rows, mesh has " + std::to_string(mesh.num_q4_nodes()) + " nodes",
                              {column == "c" ? "transport.c0_file" : "thermal.theta0_file"});
    }
    ScalarField out = constant_field(mesh, 0.0);
    for (Index i = 0; i < src.size(); ++i) out.values[static_cast<Eigen::Index>(i)] = src[i];
    return out;
}

void check_finite(const SimulationState& state, const char* what) {
    if (!state.c.values.allFinite() || !state.theta.values.allFinite() || !state.flow.velocity.allFinite() ||
        !state.flow.pressure.allFinite()) {
        std::ostringstream msg;
        msg << "non-finite values after " << what << " at step " << state.step << " (t = " << state.time << ")";
        throw DivergenceError(msg.str(), state);
    }
}

SpaceTimeCoefficient tagged_coefficient(const StructuredQuadMesh& mesh, SubdomainTag tag, double value) {
    auto tags = std::make_shared<const std::vector<SubdomainTag>>(mesh.tags());
    return [tags, tag, value](Index e, const Vec2&, double) { return (*tags)[e] == tag ? value : 0.0; };
}

} // namespace

void validate(const SimulationConfig& config) {
    std::vector<std::string> bad;
    const auto require = [&bad](bool ok, const char* key) {
        if (!ok) bad.emplace_back(key);
    };
    const auto& m = config.mesh;
    require(m.nx >= 2, "mesh.nx");
    require(m.ny >= 2, "mesh.ny");
    require(m.length > 0.0 && std::isfinite(m.length), "mesh.length");
    require(m.well_width > 0.0 && m.well_width < 0.5 * m.length, "mesh.well_width");
    const auto& f = config.flow;
    require(f.permeability > 0.0 && std::isfinite(f.permeability), "flow.permeability");
    require(f.mu0 > 0.0 && std::isfinite(f.mu0), "flow.mu0");
    require(std::isfinite(f.r_c), "flow.r_c");
    require(std::isfinite(f.r_theta), "flow.r_theta");
    require(f.perturbation >= 0.0 && f.perturbation < 1.0, "flow.perturbation");
    const auto& t = config.transport;
    require(t.d_m > 0.0 && std::isfinite(t.d_m), "transport.d_m");
    require(t.phi_injection >= 0.0 && std::isfinite(t.phi_injection), "transport.phi_injection");
    require(t.phi_production >= 0.0 && std::isfinite(t.phi_production), "transport.phi_production");
    require(std::isfinite(t.c0), "transport.c0");
    const auto& th = config.thermal;
    require(th.kappa_theta > 0.0 && std::isfinite(th.kappa_theta), "thermal.kappa_theta");
    require(std::isfinite(th.theta0), "thermal.theta0");
    const auto& tm = config.time;
    require(tm.dt > 0.0 && std::isfinite(tm.dt), "time.dt");
    require(tm.t_end >= 0.0 && std::isfinite(tm.t_end), "time.t_end");
    require(tm.snapshot_every >= 1, "time.snapshot_every");
    const auto& s = config.stabilization;
    require(s.gradient_threshold >= 0.0, "stabilization.gradient_threshold");
    require(s.sold_max_iterations >= 1, "stabilization.sold_max_iterations");
    require(s.sold_tolerance > 0.0, "stabilization.sold_tolerance");
    require(s.picard_max_iterations >= 1, "stabilization.picard_max_iterations");
    require(s.picard_tolerance > 0.0, "stabilization.picard_tolerance");
    const auto& o = config.output;
    require(o.bounds_tol >= 0.0, "output.bounds_tol");
    require(std::isfinite(o.interface_level), "output.interface_level");
    if (!bad.empty()) {
        std::string msg = "invalid configuration values:";
        for (const auto& key : bad) msg += " " + key;
        throw ValidationError(msg, bad);
    }
}

int step_count(double t_end, double dt) {
    if (!(t_end > 0.0)) return 0;
    const double ratio = t_end / dt;
    const double nearest = std::round(ratio);
    if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, ratio)) return static_cast<int>(nearest);
    return static_cast<int>(std::ceil(ratio));
}

FlowProblem make_flow_problem(const StructuredQuadMesh& mesh, const SimulationConfig& config) {
    FlowProblem p;
    p.permeability = config.flow.permeability;
    if (config.flow.perturbation > 0.0) {
        p.element_permeability =
            perturbed_permeability(mesh, config.flow.permeability, config.flow.perturbation, config.flow.seed);
    }
    p.viscosity = {config.flow.mu0, config.flow.r_c, config.flow.r_theta};
    p.source.resize(mesh.num_elements(), 0.0);
    for (Index e = 0; e < mesh.num_elements(); ++e) {
        if (mesh.tag(e) == SubdomainTag::Injection) p.source[e] = config.transport.phi_injection;
        if (mesh.tag(e) == SubdomainTag::Production) p.source[e] = -config.transport.phi_production;
    }
    p.pressure_gauge = true;  // v . n = 0 on the whole boundary
    return p;
}

namespace {

TransportProblem make_scalar_problem(const StructuredQuadMesh& mesh, const SimulationConfig& config,
                                     double diffusivity) {
    TransportProblem p;
    p.diffusivity = diffusivity;
    p.source = tagged_coefficient(mesh, SubdomainTag::Injection, config.transport.phi_injection);
    p.sink = tagged_coefficient(mesh, SubdomainTag::Production, config.transport.phi_production);
    p.gradient_threshold = config.stabilization.gradient_threshold;
    p.sold = {config.stabilization.sold_iteration, config.stabilization.sold_max_iterations,
              config.stabilization.sold_tolerance};
    return p;
}

} // namespace

TransportProblem make_concentration_problem(const StructuredQuadMesh& mesh, const SimulationConfig& config) {
    TransportProblem p = make_scalar_problem(mesh, config, config.transport.d_m);
    p.scheme = config.stabilization.scheme;
    p.initial = initial_field(mesh, config.transport.c0, config.transport.c0_file, "c");
    return p;
}

TransportProblem make_thermal_problem(const StructuredQuadMesh& mesh, const SimulationConfig& config) {
    TransportProblem p = make_scalar_problem(mesh, config, config.thermal.kappa_theta);
    p.scheme = StabilizationScheme::Supg;
    p.initial = initial_field(mesh, config.thermal.theta0, config.thermal.theta0_file, "theta");
    return p;
}

namespace {

SimulationConfig validated(SimulationConfig config) {
    validate(config);
    return config;
}

} // namespace

CoupledSimulation::CoupledSimulation(SimulationConfig config)
    : config_(validated(std::move(config))),
      mesh_(config_.mesh.nx, config_.mesh.ny, config_.mesh.length, config_.mesh.well_width),
      flow_problem_(make_flow_problem(mesh_, config_)),
      c_problem_(make_concentration_problem(mesh_, config_)),
      theta_problem_(make_thermal_problem(mesh_, config_)) {
    double scale = 0.0;
    for (Index e = 0; e < mesh_.num_elements(); ++e) scale += std::abs(flow_problem_.source[e]) * mesh_.element_area(e);
    if (std::abs(source_integral(mesh_, flow_problem_)) > 1e-12 * std::max(1.0, scale)) {
        throw ValidationError("injection and production rates do not balance on this mesh",
                              {"transport.phi_injection", "transport.phi_production"});
    }
}

SimulationState CoupledSimulation::initialize() {
    SimulationState state;
    state.time = 0.0;
    state.step = 0;
    state.c = c_problem_.initial;
    state.theta = theta_problem_.initial;
    state.c.time = 0.0;
    state.theta.time = 0.0;
    check_finite(state, "initial condition");
    state.flow = flow_solver_.solve(mesh_, flow_problem_, state.c, state.theta);
    check_finite(state, "initial flow solve");
    return state;
}

SimulationState CoupledSimulation::advance_step(const SimulationState& state) {
    const double dt = config_.time.dt;
    const auto& stab = config_.stabilization;
    const int sweeps = stab.picard ? stab.picard_max_iterations : 1;

    SimulationState next;
    next.step = state.step + 1;
    next.time = next.step * dt;
    ScalarField c_iter = state.c;
    ScalarField theta_iter = state.theta;
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        next.flow = flow_solver_.solve(mesh_, flow_problem_, c_iter, theta_iter);
        next.c = c_solver_.advance(mesh_, c_problem_, next.flow, state.c, dt);
        next.theta = theta_solver_.advance(mesh_, theta_problem_, next.flow, state.theta, dt);
        next.c.time = next.time;
        next.theta.time = next.time;
        check_finite(next, "coupled step");
        if (!stab.picard) break;
        const double change = std::max(relative_change(next.c, c_iter), relative_change(next.theta, theta_iter));
        c_iter = next.c;
        theta_iter = next.theta;
        if (change < stab.picard_tolerance) break;
    }
    return next;
}

DiagnosticsRecord CoupledSimulation::diagnose(const SimulationState& state, const SimulationState* previous) const {
    const double tol = config_.output.bounds_tol;
    DiagnosticsRecord r;
    r.step = state.step;
    r.time = state.time;
    r.c = bounds_report(mesh_, state.c, 0.0, 1.0, tol, "c");
    r.c.clamp_events = state.flow.clamp_events;
    r.theta = bounds_report(mesh_, state.theta, 0.0, 1.0, tol, "theta");
    r.interface_length = interface_length(mesh_, state.c, config_.output.interface_level);
    if (previous != nullptr) {
        const double dt = state.time - previous->time;
        ScalarField c_old = previous->c;
        ScalarField t_old = previous->theta;
        c_old.time = previous->time;
        t_old.time = previous->time;
        r.balance_residual = std::max(balance_residual(mesh_, state.c, c_old, c_problem_, dt),
                                      balance_residual(mesh_, state.theta, t_old, theta_problem_, dt));
    }
    return r;
}

RunResult CoupledSimulation::run(const OutputSinks& sinks) {
    RunResult result;
    SimulationState state = initialize();
    const auto emit = [&](const SimulationState& s, const SimulationState* prev, bool snapshot) {
        DiagnosticsRecord record = diagnose(s, prev);
        if (sinks.diagnostics) sinks.diagnostics(record);
        result.diagnostics.append(std::move(record));
        if (snapshot && sinks.snapshot) sinks.snapshot(s);
    };
    emit(state, nullptr, true);

    const int steps = step_count(config_.time.t_end, config_.time.dt);
    for (int s = 1; s <= steps; ++s) {
        SimulationState next = advance_step(state);
        emit(next, &state, s % config_.time.snapshot_every == 0 || s == steps);
        state = std::move(next);
    }
    result.steps = steps;
    result.final_state = std::move(state);
    return result;
}

SimulationState initialize(const SimulationConfig& config) {
    CoupledSimulation sim(config);
    return sim.initialize();
}

SimulationState advance_step(const SimulationState& state, const SimulationConfig& config) {
    CoupledSimulation sim(config);
    return sim.advance_step(state);
}

RunResult run(const SimulationConfig& config, const OutputSinks& sinks) {
    CoupledSimulation sim(config);
    return sim.run(sinks);
}

} // namespace ddvf
