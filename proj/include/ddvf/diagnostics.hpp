#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ddvf/fields.hpp"
#include "ddvf/mesh.hpp"
#include "ddvf/transport.hpp"

namespace ddvf {

/// Extrema and bound violations of one nodal field at one instant.
struct BoundsReport {
    std::string field;
    double time = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::size_t below_count = 0;   // nodes with u < lower - tol
    std::size_t above_count = 0;   // nodes with u > upper + tol
    double below_node_fraction = 0.0;
    double above_node_fraction = 0.0;
    double below_area_fraction = 0.0;  // elements whose centroid value violates
    double above_area_fraction = 0.0;
    std::size_t clamp_events = 0;  // viscosity exponent clamps in the flow solve

    [[nodiscard]] bool violated() const noexcept { return below_count > 0 || above_count > 0; }
};

BoundsReport bounds_report(const StructuredQuadMesh& mesh, const ScalarField& field, double lower, double upper,
                           double tol, std::string name = "c");

/// Length of the `level` contour of the bilinear nodal field, extracted by
/// marching squares with linear edge interpolation. Saddle cells are
/// resolved by comparing the cell average with the level. Returns 0 when
/// the level is not strictly inside (min, max).
double interface_length(const StructuredQuadMesh& mesh, const ScalarField& field, double level);

/// Integral of the bilinear interpolant over the domain.
double field_integral(const StructuredQuadMesh& mesh, const ScalarField& field);

/// |(int u_new - int u_old)/dt - int f + int sigma u_new|, normalized by
/// the largest magnitude among those three integrals (floored at 1e-30).
double balance_residual(const StructuredQuadMesh& mesh, const ScalarField& u_new, const ScalarField& u_old,
                        const TransportProblem& problem, double dt);

struct DiagnosticsRecord {
    int step = 0;
    double time = 0.0;
    BoundsReport c;
    BoundsReport theta;
    double interface_length = 0.0;  // c = level contour, a proxy for front convolution
    double balance_residual = 0.0;  // max over concentration and temperature
};

class DiagnosticsSeries {
public:
    /// Throws InvalidArgument if the time stamp decreases.
    void append(DiagnosticsRecord record);

    [[nodiscard]] const std::vector<DiagnosticsRecord>& records() const noexcept { return records_; }
    [[nodiscard]] bool empty() const noexcept { return records_.empty(); }
    [[nodiscard]] const DiagnosticsRecord& back() const { return records_.back(); }

private:
    std::vector<DiagnosticsRecord> records_;
};

} // namespace ddvf
