#include "ddvf/flow.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "ddvf/errors.hpp"
#include "ddvf/fem.hpp"

namespace ddvf {

namespace {

constexpr int kVelDofs = 18;
constexpr int kPresDofs = 4;
constexpr int kLocalDofs = kVelDofs + kPresDofs;

// Q9 local nodes on each local edge, ordered start, middle, end.
constexpr std::array<std::array<int, 3>, 4> kEdgeNodesQ9 = {{{0, 4, 1}, {1, 5, 2}, {2, 6, 3}, {3, 7, 0}}};

// Normal velocity component for each side: x on left/right, y on bottom/top.
int normal_component(Side side) {
    return (side == Side::Left || side == Side::Right) ? 0 : 1;
}

double normal_sign(Side side) {
    return (side == Side::Right || side == Side::Top) ? 1.0 : -1.0;
}

double eval_or_zero(const std::function<double(const Vec2&)>& f, const Vec2& x) {
    return f ? f(x) : 0.0;
}

void check_fields(const StructuredQuadMesh& mesh, const ScalarField& c, const ScalarField& theta) {
    const auto n = static_cast<Eigen::Index>(mesh.num_q4_nodes());
    if (c.values.size() != n || theta.values.size() != n) {
        throw InvalidArgument("flow: concentration/temperature fields do not match the mesh Q4 node set");
    }
}

void check_problem(const StructuredQuadMesh& mesh, const FlowProblem& problem) {
    if (problem.source.size() != mesh.num_elements()) {
        throw InvalidArgument("flow: source must hold one value per element");
    }
    if (!problem.element_permeability.empty() &&
        problem.element_permeability.size() != mesh.num_elements()) {
        throw InvalidArgument("flow: element permeability must hold one value per element");
    }
    for (Index e = 0; e < mesh.num_elements(); ++e) {
        if (!(problem.element_k(e) > 0.0)) throw InvalidArgument("flow: permeability must be positive");
    }
    if (!(problem.viscosity.mu0 > 0.0)) throw InvalidArgument("flow: mu0 must be positive");
    if (!problem.has_pressure_boundary()) {
        if (!problem.pressure_gauge) {
            throw CompatibilityError("flow: no pressure boundary and no pressure gauge; pressure is undetermined");
        }
        double total = 0.0;
        double scale = 0.0;
        for (Index e = 0; e < mesh.num_elements(); ++e) {
            total += problem.source[e] * mesh.element_area(e);
            scale += std::abs(problem.source[e]) * mesh.element_area(e);
        }
        if (std::abs(total) > 1e-12 * std::max(1.0, scale)) {
            throw CompatibilityError("flow: sources integrate to " + std::to_string(total) +
                                     " but the whole boundary carries a normal-velocity condition");
        }
    }
}

} // namespace

double viscosity(double c, double theta, const ViscosityLaw& law, std::size_t* clamp_events) {
    double exponent = law.r_c * (1.0 - c) + law.r_theta * (1.0 - theta);
    if (!(std::abs(exponent) <= kViscosityExponentLimit)) {
        exponent = std::clamp(exponent, -kViscosityExponentLimit, kViscosityExponentLimit);
        if (clamp_events) ++*clamp_events;
    }
    return law.mu0 * std::exp(exponent);
}

bool FlowProblem::has_pressure_boundary() const {
    return std::any_of(boundary.begin(), boundary.end(),
                       [](const FlowBoundary& b) { return b.kind == FlowBoundaryKind::Pressure; });
}

std::vector<double> perturbed_permeability(const StructuredQuadMesh& mesh, double k, double delta,
                                           std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> out(mesh.num_elements());
    for (auto& value : out) {
        // 53 random bits mapped to [0,1), then to [-1,1).
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        value = k * (1.0 + delta * (2.0 * u - 1.0));
    }
    return out;
}

SparseSystem assemble_flow(const StructuredQuadMesh& mesh, const FlowProblem& problem, const ScalarField& c,
                           const ScalarField& theta, std::size_t* clamp_events) {
    check_problem(mesh, problem);
    check_fields(mesh, c, theta);

    const Index n9 = mesh.num_q9_nodes();
    const Index n4 = mesh.num_q4_nodes();
    const Index pres_offset = 2 * n9;
    SparseSystem system(pres_offset + n4);

    const QuadratureRule rule = gauss_rule(3);
    Eigen::Matrix<double, kLocalDofs, kLocalDofs> local;
    Eigen::Matrix<double, kLocalDofs, 1> local_rhs;
    std::array<Index, kLocalDofs> map{};

    for (Index e = 0; e < mesh.num_elements(); ++e) {
        const auto corners = mesh.element_corners(e);
        const auto& c9 = mesh.elem_conn_q9(e);
        const auto& c4 = mesh.elem_conn_q4(e);
        for (int a = 0; a < 9; ++a) {
            map[2 * a] = 2 * c9[a];
            map[2 * a + 1] = 2 * c9[a] + 1;
        }
        for (int b = 0; b < 4; ++b) map[kVelDofs + b] = pres_offset + c4[b];

        local.setZero();
        local_rhs.setZero();
        const double k = problem.element_k(e);
        const double phi = problem.source[e];
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const MappedPoint mp = isoparametric_map(corners, ElementKind::Biquadratic9, rule.points[q]);
            const BasisValues n4b = eval_basis(ElementKind::Bilinear4, rule.points[q].x(), rule.points[q].y());
            const double wdet = rule.weights[q] * mp.det_j;

            double c_q = 0.0;
            double t_q = 0.0;
            for (int b = 0; b < 4; ++b) {
                c_q += n4b.values[b] * c.values[static_cast<Eigen::Index>(c4[b])];
                t_q += n4b.values[b] * theta.values[static_cast<Eigen::Index>(c4[b])];
            }
            if (problem.observer) problem.observer(e, c_q, t_q);
            const double resistance = viscosity(c_q, t_q, problem.viscosity, clamp_events) / k;

            const auto& nv = mp.basis.values;
            const auto& gv = mp.basis.grads;
            for (int a = 0; a < 9; ++a) {
                for (int b = 0; b < 9; ++b) {
                    const double m = resistance * nv[a] * nv[b] * wdet;
                    local(2 * a, 2 * b) += m;
                    local(2 * a + 1, 2 * b + 1) += m;
                }
                for (int d = 0; d < 2; ++d) {
                    local_rhs(2 * a + d) += nv[a] * problem.body_force[d] * wdet;
                    for (int b = 0; b < 4; ++b) {
                        const double g = -gv[a][d] * n4b.values[b] * wdet;
                        local(2 * a + d, kVelDofs + b) += g;
                        local(kVelDofs + b, 2 * a + d) += g;
                    }
                }
            }
            for (int b = 0; b < 4; ++b) local_rhs(kVelDofs + b) -= n4b.values[b] * phi * wdet;
        }
        system.scatter_add(local, map);
        for (int i = 0; i < kLocalDofs; ++i) system.rhs()[static_cast<Eigen::Index>(map[i])] += local_rhs(i);
    }

    // Natural pressure condition: -(w . n; p0) on pressure sides.
    std::vector<double> sp;
    std::vector<double> sw;
    gauss_1d(3, sp, sw);
    for (const BoundaryEdge& edge : mesh.boundary_edges()) {
        const FlowBoundary& bc = problem.boundary[static_cast<std::size_t>(edge.local_edge)];
        if (bc.kind != FlowBoundaryKind::Pressure) continue;
        const auto corners = mesh.element_corners(edge.element);
        const auto& c9 = mesh.elem_conn_q9(edge.element);
        const auto& nodes = kEdgeNodesQ9[static_cast<std::size_t>(edge.local_edge)];
        const Vec2 x0 = corners[static_cast<std::size_t>(nodes[0])];
        const Vec2 x1 = corners[static_cast<std::size_t>(nodes[2])];
        const double half_len = 0.5 * (x1 - x0).norm();
        for (std::size_t q = 0; q < sp.size(); ++q) {
            const double s = sp[q];
            const Vec2 x = 0.5 * (1.0 - s) * x0 + 0.5 * (1.0 + s) * x1;
            const double p0 = eval_or_zero(bc.value, x);
            const std::array<double, 3> shape = {0.5 * s * (s - 1.0), 1.0 - s * s, 0.5 * s * (s + 1.0)};
            for (int a = 0; a < 3; ++a) {
                const Index node = c9[static_cast<std::size_t>(nodes[static_cast<std::size_t>(a)])];
                for (int d = 0; d < 2; ++d) {
                    system.rhs()[static_cast<Eigen::Index>(2 * node + static_cast<Index>(d))] -=
                        shape[static_cast<std::size_t>(a)] * edge.normal[d] * p0 * half_len * sw[q];
                }
            }
        }
    }

    // Essential normal-velocity condition on the remaining sides.
    for (int s = 0; s < 4; ++s) {
        const FlowBoundary& bc = problem.boundary[static_cast<std::size_t>(s)];
        if (bc.kind != FlowBoundaryKind::NormalVelocity) continue;
        const Side side = static_cast<Side>(s);
        const int comp = normal_component(side);
        for (const Index node : mesh.side_q9_nodes(side)) {
            const double vn = eval_or_zero(bc.value, mesh.q9_nodes()[node]);
            system.constrain(2 * node + static_cast<Index>(comp), vn * normal_sign(side));
        }
    }

    if (!problem.has_pressure_boundary()) system.set_mean_zero_gauge(pres_offset, n4);
    return system;
}

FlowSolution FlowSolver::solve(const StructuredQuadMesh& mesh, const FlowProblem& problem, const ScalarField& c,
                               const ScalarField& theta) {
    std::size_t clamps = 0;
    SparseSystem system = assemble_flow(mesh, problem, c, theta, &clamps);
    const Eigen::VectorXd x = solver_.solve(system);
    const auto nv = static_cast<Eigen::Index>(2 * mesh.num_q9_nodes());
    FlowSolution out;
    out.velocity = x.head(nv);
    out.pressure = x.segment(nv, static_cast<Eigen::Index>(mesh.num_q4_nodes()));
    out.clamp_events = clamps;
    out.divergence = problem.source;
    return out;
}

FlowSolution solve_flow(const StructuredQuadMesh& mesh, const FlowProblem& problem, const ScalarField& c,
                        const ScalarField& theta) {
    FlowSolver solver;
    return solver.solve(mesh, problem, c, theta);
}

Eigen::VectorXd mass_balance_defects(const StructuredQuadMesh& mesh, const FlowProblem& problem,
                                     const FlowSolution& solution) {
    Eigen::VectorXd defect = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.num_q4_nodes()));
    const QuadratureRule rule = gauss_rule(3);
    for (Index e = 0; e < mesh.num_elements(); ++e) {
        const auto corners = mesh.element_corners(e);
        const auto& c9 = mesh.elem_conn_q9(e);
        const auto& c4 = mesh.elem_conn_q4(e);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const MappedPoint mp = isoparametric_map(corners, ElementKind::Biquadratic9, rule.points[q]);
            const BasisValues n4b = eval_basis(ElementKind::Bilinear4, rule.points[q].x(), rule.points[q].y());
            double div = 0.0;
            for (int a = 0; a < 9; ++a) div += mp.basis.grads[a].dot(solution.node_velocity(c9[a]));
            const double r = (div - problem.source[e]) * rule.weights[q] * mp.det_j;
            for (int b = 0; b < 4; ++b) defect[static_cast<Eigen::Index>(c4[b])] += n4b.values[b] * r;
        }
    }
    return defect;
}

double source_integral(const StructuredQuadMesh& mesh, const FlowProblem& problem) {
    double total = 0.0;
    for (Index e = 0; e < mesh.num_elements(); ++e) total += problem.source[e] * mesh.element_area(e);
    return total;
}

double injection_rate(const StructuredQuadMesh& mesh, const FlowProblem& problem) {
    double total = 0.0;
    for (Index e = 0; e < mesh.num_elements(); ++e) {
        if (problem.source[e] > 0.0) total += problem.source[e] * mesh.element_area(e);
    }
    return total;
}

} // namespace ddvf
