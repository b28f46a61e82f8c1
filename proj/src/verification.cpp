#include "ddvf/verification.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ddvf/fem.hpp"
#include "ddvf/flow.hpp"

namespace ddvf {

namespace {

using std::numbers::pi;

// Manufactured transport problem. The velocity is divergence free and
// tangential on the boundary, and u has zero normal derivative there, so the
// problem is closed by zero total flux on every side.
constexpr double kDiffusivity = 0.05;
constexpr double kSpeed = 1.0;
constexpr double kFinalTimeSpace = 1.0 / 16.0;
constexpr double kFinalTimeTime = 0.5;

double exact_u(const Vec2& x, double t) {
    return std::exp(-t) * std::cos(pi * x.x()) * std::cos(pi * x.y());
}

Vec2 cell_velocity(const Vec2& x) {
    return kSpeed * Vec2(std::sin(pi * x.x()) * std::cos(pi * x.y()), -std::cos(pi * x.x()) * std::sin(pi * x.y()));
}

double manufactured_source(const Vec2& x, double t) {
    const double u = exact_u(x, t);
    const double e = std::exp(-t);
    const Vec2 grad(-pi * e * std::sin(pi * x.x()) * std::cos(pi * x.y()),
                    -pi * e * std::cos(pi * x.x()) * std::sin(pi * x.y()));
    // u_t + v . grad u - d lap u
    return -u + cell_velocity(x).dot(grad) + kDiffusivity * 2.0 * pi * pi * u;
}

double l2_error(const StructuredQuadMesh& mesh, const ScalarField& u, double t) {
    const QuadratureRule rule = gauss_rule(3);
    double sum = 0.0;
    for (Index e = 0; e < mesh.num_elements(); ++e) {
        const auto corners = mesh.element_corners(e);
        const auto& c = mesh.elem_conn_q4(e);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const MappedPoint mp = isoparametric_map(corners, ElementKind::Bilinear4, rule.points[q]);
            double uh = 0.0;
            for (int b = 0; b < 4; ++b) uh += mp.basis.values[b] * u.values[static_cast<Eigen::Index>(c[b])];
            const double diff = uh - exact_u(mp.x, t);
            sum += diff * diff * rule.weights[q] * mp.det_j;
        }
    }
    return std::sqrt(sum);
}

double run_manufactured(StabilizationScheme scheme, int n, int steps, double t_end) {
    const StructuredQuadMesh mesh(n, n, 1.0, 0.25);
    TransportProblem problem;
    problem.diffusivity = kDiffusivity;
    problem.scheme = scheme;
    problem.source = [](Index, const Vec2& x, double t) { return manufactured_source(x, t); };
    const FlowSolution velocity = prescribed_velocity(mesh, cell_velocity);
    ScalarField u = interpolate_field(mesh, [](const Vec2& x) { return exact_u(x, 0.0); });
    const double dt = t_end / steps;
    TransportSolver solver;
    for (int s = 1; s <= steps; ++s) {
        u = solver.advance(mesh, problem, velocity, u, dt);
        u.time = s * dt;
    }
    return l2_error(mesh, u, t_end);
}

void fill_orders(ConvergenceStudy& study) {
    for (std::size_t i = 1; i < study.errors.size(); ++i) {
        study.orders.push_back(std::log2(study.errors[i - 1] / study.errors[i]));
    }
}

std::string describe(const ConvergenceStudy& s) {
    std::ostringstream os;
    os << "errors";
    for (const double e : s.errors) os << ' ' << e;
    os << "; orders";
    for (const double o : s.orders) os << ' ' << o;
    return os.str();
}

} // namespace

VerificationResult flow_patch_test() {
    const StructuredQuadMesh mesh(4, 4, 1.0, 0.25);
    FlowProblem problem;
    problem.viscosity = {1.0, 0.0, 0.0};
    problem.source.assign(mesh.num_elements(), 0.0);
    for (auto& side : problem.boundary) {
        side = {FlowBoundaryKind::Pressure, [](const Vec2& x) { return 1.0 - x.x(); }};
    }
    const ScalarField one = constant_field(mesh, 1.0);
    const FlowSolution sol = solve_flow(mesh, problem, one, one);

    double err = 0.0;
    for (Index k = 0; k < mesh.num_q9_nodes(); ++k) err = std::max(err, (sol.node_velocity(k) - Vec2(1.0, 0.0)).cwiseAbs().maxCoeff());
    for (Index i = 0; i < mesh.num_q4_nodes(); ++i) {
        err = std::max(err, std::abs(sol.pressure[static_cast<Eigen::Index>(i)] - (1.0 - mesh.corner_nodes()[i].x())));
    }
    return {"flow patch test", err <= 1e-10, err, 1e-10, "max nodal error in (v, p)"};
}

ConvergenceStudy spatial_convergence(StabilizationScheme scheme, const std::vector<int>& meshes) {
    ConvergenceStudy study;
    study.meshes = meshes;
    for (const int n : meshes) {
        // dt = h^2 exactly: steps = t_end * n^2.
        const int steps = static_cast<int>(std::lround(kFinalTimeSpace * n * n));
        study.dts.push_back(kFinalTimeSpace / steps);
        study.errors.push_back(run_manufactured(scheme, n, steps, kFinalTimeSpace));
    }
    fill_orders(study);
    return study;
}

ConvergenceStudy temporal_convergence(StabilizationScheme scheme, int mesh, const std::vector<int>& step_counts) {
    ConvergenceStudy study;
    for (const int steps : step_counts) {
        study.meshes.push_back(mesh);
        study.dts.push_back(kFinalTimeTime / steps);
        study.errors.push_back(run_manufactured(scheme, mesh, steps, kFinalTimeTime));
    }
    fill_orders(study);
    return study;
}

VerificationResult spatial_convergence_check() {
    const ConvergenceStudy s = spatial_convergence(StabilizationScheme::Supg, {16, 32, 64});
    const double order = *std::min_element(s.orders.begin(), s.orders.end());
    return {"SUPG spatial L2 order (16/32/64, dt = h^2)", order >= 1.9, order, 1.9, describe(s)};
}

VerificationResult temporal_convergence_check() {
    const ConvergenceStudy s = temporal_convergence(StabilizationScheme::Supg, 64, {5, 10, 20});
    const double order = *std::min_element(s.orders.begin(), s.orders.end());
    return {"SUPG temporal order (64^2, dt halving)", order >= 0.9, order, 0.9, describe(s)};
}

std::vector<VerificationResult> run_verification_suite() {
    return {flow_patch_test(), spatial_convergence_check(), temporal_convergence_check()};
}

} // namespace ddvf
