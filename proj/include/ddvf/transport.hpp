#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string_view>

#include "ddvf/fields.hpp"
#include "ddvf/flow.hpp"
#include "ddvf/linalg.hpp"
#include "ddvf/mesh.hpp"

namespace ddvf {

enum class StabilizationScheme { Galerkin, Supg, SupgIsoSold, SupgCrosswindSold, SupgBothSold };

[[nodiscard]] constexpr bool uses_supg(StabilizationScheme s) noexcept {
    return s != StabilizationScheme::Galerkin;
}
[[nodiscard]] constexpr bool uses_iso_sold(StabilizationScheme s) noexcept {
    return s == StabilizationScheme::SupgIsoSold || s == StabilizationScheme::SupgBothSold;
}
[[nodiscard]] constexpr bool uses_crosswind_sold(StabilizationScheme s) noexcept {
    return s == StabilizationScheme::SupgCrosswindSold || s == StabilizationScheme::SupgBothSold;
}

/// CLI spelling: galerkin, supg, supg-iso, supg-cw, supg-both.
[[nodiscard]] std::string_view scheme_name(StabilizationScheme s) noexcept;
[[nodiscard]] std::optional<StabilizationScheme> parse_scheme(std::string_view name) noexcept;

// ---------------------------------------------------------------------------
// Stabilization parameters
// ---------------------------------------------------------------------------

/// Upwind function coth(chi) - 1/chi, with the series chi/3 - chi^3/45 below 1e-3.
double upwind_xi(double chi);

/// Element Peclet number h |v| / (2 lambda_min).
double element_peclet(double h, double speed, double lambda_min);

/// SUPG parameter h/(2|v|) xi(Pe_h); equals h^2/(12 lambda_min) for |v| < 1e-12.
double compute_tau(const Vec2& v, double h, double lambda_min);

/// (v . g) g / |g|^2, or zero when |g| <= eps_g.
Vec2 sold_parallel_velocity(const Vec2& v, const Vec2& grad_c, double eps_g);

/// max{0, tau(v_par) - tau(v)}.
double tau_iso(const Vec2& v, const Vec2& v_par, double h, double lambda_min);

/// I - v v^T / |v|^2, or the zero tensor when |v| <= 1e-12.
Mat2 crosswind_projector(const Vec2& v);

/// max{0, |v| h^(2/3) - lambda_min}.
double tau_crosswind(const Vec2& v, double h, double lambda_min);

// ---------------------------------------------------------------------------
// Problem description and time stepping
// ---------------------------------------------------------------------------

/// Coefficient evaluated at a quadrature point of an element at time t.
using SpaceTimeCoefficient = std::function<double(Index element, const Vec2& x, double t)>;

/// Boundary condition on one side. Flux prescribes the outward total flux
/// (v u - d grad u) . n; Value prescribes u. An empty function means zero.
struct ScalarBoundary {
    enum class Kind { Flux, Value };
    Kind kind = Kind::Flux;
    std::function<double(const Vec2&, double)> value;
};

/// Optional fixed-point iteration on the solution-dependent SOLD terms.
struct SoldIteration {
    bool enabled = false;
    int max_iterations = 10;
    double tolerance = 1e-6;
};

/// du/dt + div[v u - d grad u] = f - sigma u with D = d I.
struct TransportProblem {
    double diffusivity = 1.0;
    SpaceTimeCoefficient source;  // f
    SpaceTimeCoefficient sink;    // sigma >= 0
    std::array<ScalarBoundary, 4> boundary;  // indexed by Side
    ScalarField initial;
    StabilizationScheme scheme = StabilizationScheme::Supg;
    double gradient_threshold = 1e-10;
    SoldIteration sold;

    [[nodiscard]] double source_at(Index e, const Vec2& x, double t) const { return source ? source(e, x, t) : 0.0; }
    [[nodiscard]] double sink_at(Index e, const Vec2& x, double t) const { return sink ? sink(e, x, t) : 0.0; }
};

/// Backward-Euler system for u at time u_prev.time + dt. `u_lag` supplies
/// grad u for the isotropic SOLD direction.
SparseSystem assemble_transport_step(const StructuredQuadMesh& mesh, const TransportProblem& problem,
                                     const FlowSolution& velocity, const ScalarField& u_prev,
                                     const ScalarField& u_lag, double dt);

/// Scalar solver that keeps its factorization pattern between steps.
class TransportSolver {
public:
    ScalarField advance(const StructuredQuadMesh& mesh, const TransportProblem& problem,
                        const FlowSolution& velocity, const ScalarField& u_prev, double dt);

    /// Fixed-point iterations used by the last advance (1 without SOLD iteration).
    [[nodiscard]] int last_iterations() const noexcept { return last_iterations_; }

private:
    LinearSolver solver_;
    int last_iterations_ = 0;
};

ScalarField advance_scalar(const StructuredQuadMesh& mesh, const TransportProblem& problem,
                           const FlowSolution& velocity, const ScalarField& u_prev, double dt);

/// Flow solution carrying an analytic velocity interpolated at the Q9 nodes
/// (pressure zero). Used to drive the scalar solver with a prescribed field.
template <class F>
FlowSolution prescribed_velocity(const StructuredQuadMesh& mesh, F&& v) {
    FlowSolution out;
    out.velocity.resize(static_cast<Eigen::Index>(2 * mesh.num_q9_nodes()));
    for (Index k = 0; k < mesh.num_q9_nodes(); ++k) {
        const Vec2 value = v(mesh.q9_nodes()[k]);
        out.velocity[static_cast<Eigen::Index>(2 * k)] = value.x();
        out.velocity[static_cast<Eigen::Index>(2 * k + 1)] = value.y();
    }
    out.pressure = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.num_q4_nodes()));
    return out;
}

} // namespace ddvf
