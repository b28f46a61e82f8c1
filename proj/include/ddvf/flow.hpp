#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "ddvf/fields.hpp"
#include "ddvf/linalg.hpp"
#include "ddvf/mesh.hpp"

namespace ddvf {

/// mu = mu0 * exp[R_c (1 - c) + R_theta (1 - theta)]
struct ViscosityLaw {
    double mu0 = 1.0;
    double r_c = 2.0;
    double r_theta = 2.0;

    bool operator==(const ViscosityLaw&) const = default;
};

/// Bound on |exponent| before exponentiation.
inline constexpr double kViscosityExponentLimit = 50.0;

/// Evaluate the viscosity law. Values of c and theta outside [0,1] are
/// accepted as-is. If the exponent has to be clamped and `clamp_events` is
/// non-null, it is incremented.
double viscosity(double c, double theta, const ViscosityLaw& law, std::size_t* clamp_events = nullptr);

enum class FlowBoundaryKind { NormalVelocity, Pressure };

/// Condition on one side of the square. `value` is v_n or p0 as a function
/// of position; an empty function means zero.
struct FlowBoundary {
    FlowBoundaryKind kind = FlowBoundaryKind::NormalVelocity;
    std::function<double(const Vec2&)> value;
};

/// Called with the interpolated (c, theta) at every quadrature point where
/// the viscosity is evaluated.
using ViscosityObserver = std::function<void(Index element, double c, double theta)>;

struct FlowProblem {
    double permeability = 1.0;
    /// Per-element permeability; overrides `permeability` when non-empty.
    std::vector<double> element_permeability;
    ViscosityLaw viscosity;
    /// Per-element volumetric source phi (positive injects).
    std::vector<double> source;
    Vec2 body_force = Vec2::Zero();
    std::array<FlowBoundary, 4> boundary;  // indexed by Side
    /// Zero-mean pressure; required when no side carries a pressure condition.
    bool pressure_gauge = true;
    ViscosityObserver observer;

    [[nodiscard]] double element_k(Index e) const {
        return element_permeability.empty() ? permeability : element_permeability[e];
    }
    [[nodiscard]] bool has_pressure_boundary() const;
};

/// Q9 velocity (interleaved vx, vy per node) and Q4 pressure.
struct FlowSolution {
    Eigen::VectorXd velocity;
    Eigen::VectorXd pressure;
    std::size_t clamp_events = 0;
    /// Per-element divergence the solve enforced (the source). Empty when the
    /// velocity did not come from a flow solve.
    std::vector<double> divergence;

    [[nodiscard]] Vec2 node_velocity(Index q9_node) const {
        const auto k = static_cast<Eigen::Index>(2 * q9_node);
        return {velocity[k], velocity[k + 1]};
    }
};

/// Per-element k (1 + delta r_e) with r_e uniform on [-1,1] drawn from a
/// mt19937_64 stream, reproducible across platforms.
std::vector<double> perturbed_permeability(const StructuredQuadMesh& mesh, double k, double delta,
                                           std::uint64_t seed);

/// Block system [[A, B^T], [B, 0]]. Unknown layout: velocity dof 2*node + d,
/// then pressure at offset 2*num_q9_nodes.
SparseSystem assemble_flow(const StructuredQuadMesh& mesh, const FlowProblem& problem, const ScalarField& c,
                           const ScalarField& theta, std::size_t* clamp_events = nullptr);

/// Flow solver that keeps the symbolic factorization between solves.
class FlowSolver {
public:
    FlowSolution solve(const StructuredQuadMesh& mesh, const FlowProblem& problem, const ScalarField& c,
                       const ScalarField& theta);

private:
    LinearSolver solver_;
};

FlowSolution solve_flow(const StructuredQuadMesh& mesh, const FlowProblem& problem, const ScalarField& c,
                        const ScalarField& theta);

/// Per-pressure-node defect (q_i; div v - phi) of a flow solution.
Eigen::VectorXd mass_balance_defects(const StructuredQuadMesh& mesh, const FlowProblem& problem,
                                     const FlowSolution& solution);

/// Total source integral over the domain.
double source_integral(const StructuredQuadMesh& mesh, const FlowProblem& problem);

/// Net volumetric rate over elements with positive source (injection).
double injection_rate(const StructuredQuadMesh& mesh, const FlowProblem& problem);

} // namespace ddvf
