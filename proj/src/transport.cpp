#include "ddvf/transport.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ddvf/errors.hpp"
#include "ddvf/fem.hpp"

namespace ddvf {

namespace {

constexpr double kSeriesSwitch = 1e-3;
constexpr double kZeroSpeed = 1e-12;

// Q4 local nodes on each local edge (start, end).
constexpr std::array<std::array<int, 2>, 4> kEdgeNodesQ4 = {{{0, 1}, {1, 2}, {2, 3}, {3, 0}}};

double max_abs(const Eigen::VectorXd& v) {
    return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

} // namespace

std::string_view scheme_name(StabilizationScheme s) noexcept {
    switch (s) {
    case StabilizationScheme::Galerkin: return "galerkin";
    case StabilizationScheme::Supg: return "supg";
    case StabilizationScheme::SupgIsoSold: return "supg-iso";
    case StabilizationScheme::SupgCrosswindSold: return "supg-cw";
    case StabilizationScheme::SupgBothSold: return "supg-both";
    }
    return "unknown";
}

std::optional<StabilizationScheme> parse_scheme(std::string_view name) noexcept {
    for (auto s : {StabilizationScheme::Galerkin, StabilizationScheme::Supg, StabilizationScheme::SupgIsoSold,
                   StabilizationScheme::SupgCrosswindSold, StabilizationScheme::SupgBothSold}) {
        if (scheme_name(s) == name) return s;
    }
    return std::nullopt;
}

double upwind_xi(double chi) {
    if (!(chi >= 0.0)) throw InvalidArgument("upwind_xi: argument must be non-negative");
    if (chi < kSeriesSwitch) return chi / 3.0 - chi * chi * chi / 45.0;
    if (chi > 40.0) return 1.0 - 1.0 / chi;  // coth(chi) == 1 in double precision
    return 1.0 / std::tanh(chi) - 1.0 / chi;
}

double element_peclet(double h, double speed, double lambda_min) {
    if (!(h > 0.0)) throw InvalidArgument("element_peclet: element length must be positive");
    if (!(lambda_min > 0.0)) throw InvalidArgument("element_peclet: lambda_min must be positive");
    if (!(speed >= 0.0)) throw InvalidArgument("element_peclet: speed must be non-negative");
    return h * speed / (2.0 * lambda_min);
}

double compute_tau(const Vec2& v, double h, double lambda_min) {
    const double speed = v.norm();
    const double pe = element_peclet(h, speed, lambda_min);
    if (speed < kZeroSpeed) return h * h / (12.0 * lambda_min);
    return h / (2.0 * speed) * upwind_xi(pe);
}

Vec2 sold_parallel_velocity(const Vec2& v, const Vec2& grad_c, double eps_g) {
    const double g2 = grad_c.squaredNorm();
    if (!(std::sqrt(g2) > eps_g)) return Vec2::Zero();
    return (v.dot(grad_c) / g2) * grad_c;
}

double tau_iso(const Vec2& v, const Vec2& v_par, double h, double lambda_min) {
    return std::max(0.0, compute_tau(v_par, h, lambda_min) - compute_tau(v, h, lambda_min));
}

Mat2 crosswind_projector(const Vec2& v) {
    const double v2 = v.squaredNorm();
    if (!(std::sqrt(v2) > kZeroSpeed)) return Mat2::Zero();
    return Mat2::Identity() - v * v.transpose() / v2;
}

double tau_crosswind(const Vec2& v, double h, double lambda_min) {
    if (!(h > 0.0)) throw InvalidArgument("tau_crosswind: element length must be positive");
    return std::max(0.0, v.norm() * std::cbrt(h * h) - lambda_min);
}

SparseSystem assemble_transport_step(const StructuredQuadMesh& mesh, const TransportProblem& problem,
                                     const FlowSolution& velocity, const ScalarField& u_prev,
                                     const ScalarField& u_lag, double dt) {
    if (!(dt > 0.0)) throw InvalidArgument("assemble_transport_step: dt must be positive");
    if (!(problem.diffusivity > 0.0)) throw InvalidArgument("assemble_transport_step: diffusivity must be positive");
    const auto n4 = static_cast<Eigen::Index>(mesh.num_q4_nodes());
    if (u_prev.values.size() != n4 || u_lag.values.size() != n4) {
        throw InvalidArgument("assemble_transport_step: field does not match the mesh Q4 node set");
    }
    if (velocity.velocity.size() != static_cast<Eigen::Index>(2 * mesh.num_q9_nodes())) {
        throw InvalidArgument("assemble_transport_step: velocity does not match the mesh Q9 node set");
    }
    if (!velocity.divergence.empty() && velocity.divergence.size() != mesh.num_elements()) {
        throw InvalidArgument("assemble_transport_step: divergence does not match the mesh elements");
    }

    const double d = problem.diffusivity;
    const double t_new = u_prev.time + dt;
    const StabilizationScheme scheme = problem.scheme;
    SparseSystem system(mesh.num_q4_nodes());

    const QuadratureRule rule = gauss_rule(3);
    Eigen::Matrix4d local;
    Eigen::Vector4d local_rhs;
    std::array<Index, 4> map{};

    for (Index e = 0; e < mesh.num_elements(); ++e) {
        const auto corners = mesh.element_corners(e);
        const auto& c4 = mesh.elem_conn_q4(e);
        const auto& c9 = mesh.elem_conn_q9(e);
        std::copy(c4.begin(), c4.end(), map.begin());
        const double h = mesh.h_elem(e);

        std::array<Vec2, 9> v_nodes;
        for (int k = 0; k < 9; ++k) v_nodes[k] = velocity.node_velocity(c9[k]);

        local.setZero();
        local_rhs.setZero();
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const MappedPoint mp = isoparametric_map(corners, ElementKind::Bilinear4, rule.points[q]);
            const MappedPoint mv = isoparametric_map(corners, ElementKind::Biquadratic9, rule.points[q]);
            const double wdet = rule.weights[q] * mp.det_j;
            const auto& nb = mp.basis.values;
            const auto& gb = mp.basis.grads;

            Vec2 v = Vec2::Zero();
            double div_v = 0.0;
            for (int k = 0; k < 9; ++k) {
                v += mv.basis.values[k] * v_nodes[k];
                div_v += mv.basis.grads[k].dot(v_nodes[k]);
            }
            // The discrete divergence matches the source only weakly; inside
            // the residual it would act as a spurious reaction term.
            if (!velocity.divergence.empty()) div_v = velocity.divergence[e];
            double u_old = 0.0;
            Vec2 grad_lag = Vec2::Zero();
            for (int b = 0; b < 4; ++b) {
                u_old += nb[b] * u_prev.values[static_cast<Eigen::Index>(c4[b])];
                grad_lag += gb[b] * u_lag.values[static_cast<Eigen::Index>(c4[b])];
            }
            const double f = problem.source_at(e, mp.x, t_new);
            const double sigma = problem.sink_at(e, mp.x, t_new);
            if (!(sigma >= 0.0)) throw InvalidArgument("assemble_transport_step: sink coefficient must be >= 0");

            // Strong-form operator applied to each trial function, and the
            // known part of the residual.
            std::array<double, 4> op{};
            for (int b = 0; b < 4; ++b) {
                const double lap = mp.basis.hessians[b].trace();
                op[b] = nb[b] / dt + v.dot(gb[b]) + div_v * nb[b] - d * lap + sigma * nb[b];
            }
            const double known = u_old / dt + f;

            // Residual-weighted test direction: tau v + tau_1 v_par.
            Vec2 streamline = Vec2::Zero();
            if (uses_supg(scheme)) streamline += compute_tau(v, h, d) * v;
            if (uses_iso_sold(scheme)) {
                const Vec2 v_par = sold_parallel_velocity(v, grad_lag, problem.gradient_threshold);
                streamline += tau_iso(v, v_par, h, d) * v_par;
            }
            Mat2 crosswind = Mat2::Zero();
            if (uses_crosswind_sold(scheme)) crosswind = tau_crosswind(v, h, d) * crosswind_projector(v);

            for (int a = 0; a < 4; ++a) {
                const double weight = streamline.dot(gb[a]);
                const Vec2 cw = crosswind * gb[a];
                for (int b = 0; b < 4; ++b) {
                    const double galerkin = nb[a] * nb[b] / dt - gb[a].dot(v) * nb[b] + d * gb[a].dot(gb[b]) +
                                            sigma * nb[a] * nb[b];
                    local(a, b) += (galerkin + weight * op[b] + cw.dot(gb[b])) * wdet;
                }
                local_rhs(a) += (nb[a] * known + weight * known) * wdet;
            }
        }
        system.scatter_add(local, map);
        for (int a = 0; a < 4; ++a) system.rhs()[static_cast<Eigen::Index>(map[a])] += local_rhs(a);
    }

    // Prescribed outward flux enters as -(w; h) on flux sides.
    std::vector<double> sp;
    std::vector<double> sw;
    gauss_1d(3, sp, sw);
    for (const BoundaryEdge& edge : mesh.boundary_edges()) {
        const ScalarBoundary& bc = problem.boundary[static_cast<std::size_t>(edge.local_edge)];
        if (bc.kind != ScalarBoundary::Kind::Flux || !bc.value) continue;
        const auto corners = mesh.element_corners(edge.element);
        const auto& c4 = mesh.elem_conn_q4(edge.element);
        const auto& nodes = kEdgeNodesQ4[static_cast<std::size_t>(edge.local_edge)];
        const Vec2 x0 = corners[static_cast<std::size_t>(nodes[0])];
        const Vec2 x1 = corners[static_cast<std::size_t>(nodes[1])];
        const double half_len = 0.5 * (x1 - x0).norm();
        for (std::size_t q = 0; q < sp.size(); ++q) {
            const double s = sp[q];
            const Vec2 x = 0.5 * (1.0 - s) * x0 + 0.5 * (1.0 + s) * x1;
            const double flux = bc.value(x, t_new);
            system.rhs()[static_cast<Eigen::Index>(c4[static_cast<std::size_t>(nodes[0])])] -=
                0.5 * (1.0 - s) * flux * half_len * sw[q];
            system.rhs()[static_cast<Eigen::Index>(c4[static_cast<std::size_t>(nodes[1])])] -=
                0.5 * (1.0 + s) * flux * half_len * sw[q];
        }
    }

    for (int s = 0; s < 4; ++s) {
        const ScalarBoundary& bc = problem.boundary[static_cast<std::size_t>(s)];
        if (bc.kind != ScalarBoundary::Kind::Value) continue;
        for (const Index node : mesh.side_q4_nodes(static_cast<Side>(s))) {
            system.constrain(node, bc.value ? bc.value(mesh.corner_nodes()[node], t_new) : 0.0);
        }
    }
    return system;
}

ScalarField TransportSolver::advance(const StructuredQuadMesh& mesh, const TransportProblem& problem,
                                     const FlowSolution& velocity, const ScalarField& u_prev, double dt) {
    const bool iterate = problem.sold.enabled && uses_iso_sold(problem.scheme);
    const int max_iterations = iterate ? std::max(1, problem.sold.max_iterations) : 1;

    ScalarField lag = u_prev;
    ScalarField next{Eigen::VectorXd(), u_prev.time + dt};
    last_iterations_ = 0;
    for (int it = 0; it < max_iterations; ++it) {
        SparseSystem system = assemble_transport_step(mesh, problem, velocity, u_prev, lag, dt);
        next.values = solver_.solve(system);
        ++last_iterations_;
        if (!iterate) break;
        const double change = max_abs(next.values - lag.values) / std::max(max_abs(next.values), 1e-30);
        lag.values = next.values;
        if (change < problem.sold.tolerance) break;
    }
    return next;
}

ScalarField advance_scalar(const StructuredQuadMesh& mesh, const TransportProblem& problem,
                           const FlowSolution& velocity, const ScalarField& u_prev, double dt) {
    TransportSolver solver;
    return solver.advance(mesh, problem, velocity, u_prev, dt);
}

} // namespace ddvf
