#include "ddvf/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "ddvf/errors.hpp"
#include "ddvf/fem.hpp"

namespace ddvf {

BoundsReport bounds_report(const StructuredQuadMesh& mesh, const ScalarField& field, double lower, double upper,
                           double tol, std::string name) {
    if (!(tol >= 0.0)) throw InvalidArgument("bounds_report: tolerance must be non-negative");
    const auto& u = field.values;
    if (u.size() != static_cast<Eigen::Index>(mesh.num_q4_nodes())) {
        throw InvalidArgument("bounds_report: field does not match the mesh");
    }
    BoundsReport r;
    r.field = std::move(name);
    r.time = field.time;
    r.min = u.minCoeff();
    r.max = u.maxCoeff();
    const double lo = lower - tol;
    const double hi = upper + tol;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        if (u[i] < lo) ++r.below_count;
        if (u[i] > hi) ++r.above_count;
    }
    const auto n = static_cast<double>(u.size());
    r.below_node_fraction = static_cast<double>(r.below_count) / n;
    r.above_node_fraction = static_cast<double>(r.above_count) / n;

    double total = 0.0;
    double below = 0.0;
    double above = 0.0;
    for (Index e = 0; e < mesh.num_elements(); ++e) {
        const auto& c = mesh.elem_conn_q4(e);
        double centre = 0.0;
        for (const Index k : c) centre += 0.25 * u[static_cast<Eigen::Index>(k)];
        const double area = mesh.element_area(e);
        total += area;
        if (centre < lo) below += area;
        if (centre > hi) above += area;
    }
    r.below_area_fraction = below / total;
    r.above_area_fraction = above / total;
    return r;
}

double interface_length(const StructuredQuadMesh& mesh, const ScalarField& field, double level) {
    const auto& u = field.values;
    if (u.size() == 0) return 0.0;
    if (!(level > u.minCoeff() && level < u.maxCoeff())) return 0.0;

    double length = 0.0;
    std::array<Vec2, 4> x;
    std::array<double, 4> v;
    std::array<bool, 4> above;
    std::array<Vec2, 4> cross;  // crossing point on edge k = (k, k+1)
    std::array<bool, 4> has_cross;
    for (Index e = 0; e < mesh.num_elements(); ++e) {
        const auto& c = mesh.elem_conn_q4(e);
        int n_above = 0;
        for (int k = 0; k < 4; ++k) {
            x[k] = mesh.corner_nodes()[c[k]];
            v[k] = u[static_cast<Eigen::Index>(c[k])];
            above[k] = v[k] > level;
            n_above += above[k] ? 1 : 0;
        }
        if (n_above == 0 || n_above == 4) continue;
        for (int k = 0; k < 4; ++k) {
            const int m = (k + 1) % 4;
            has_cross[k] = above[k] != above[m];
            if (has_cross[k]) {
                const double t = (level - v[k]) / (v[m] - v[k]);
                cross[k] = x[k] + t * (x[m] - x[k]);
            }
        }
        const bool saddle = n_above == 2 && above[0] == above[2];
        if (!saddle) {
            int first = -1;
            for (int k = 0; k < 4; ++k) {
                if (!has_cross[k]) continue;
                if (first < 0) {
                    first = k;
                } else {
                    length += (cross[k] - cross[first]).norm();
                }
            }
            continue;
        }
        // Corner k is cut off by the segment joining edges k-1 and k.
        const double mean = 0.25 * (v[0] + v[1] + v[2] + v[3]);
        int isolated = 1;  // a centre exactly on the level isolates corners 1 and 3
        if (mean != level) {
            const bool centre_above = mean > level;
            isolated = (above[0] != centre_above) ? 0 : 1;
        }
        length += (cross[(isolated + 3) % 4] - cross[isolated]).norm();
        length += (cross[(isolated + 1) % 4] - cross[isolated + 2]).norm();
    }
    return length;
}

double field_integral(const StructuredQuadMesh& mesh, const ScalarField& field) {
    const QuadratureRule rule = gauss_rule(2);
    double total = 0.0;
    for (Index e = 0; e < mesh.num_elements(); ++e) {
        const auto corners = mesh.element_corners(e);
        const auto& c = mesh.elem_conn_q4(e);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const MappedPoint mp = isoparametric_map(corners, ElementKind::Bilinear4, rule.points[q]);
            double value = 0.0;
            for (int b = 0; b < 4; ++b) value += mp.basis.values[b] * field.values[static_cast<Eigen::Index>(c[b])];
            total += value * rule.weights[q] * mp.det_j;
        }
    }
    return total;
}

double balance_residual(const StructuredQuadMesh& mesh, const ScalarField& u_new, const ScalarField& u_old,
                        const TransportProblem& problem, double dt) {
    if (!(dt > 0.0)) throw InvalidArgument("balance_residual: dt must be positive");
    const double t_new = u_old.time + dt;
    const QuadratureRule rule = gauss_rule(3);
    double source = 0.0;
    double sink = 0.0;
    for (Index e = 0; e < mesh.num_elements(); ++e) {
        const auto corners = mesh.element_corners(e);
        const auto& c = mesh.elem_conn_q4(e);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const MappedPoint mp = isoparametric_map(corners, ElementKind::Bilinear4, rule.points[q]);
            const double w = rule.weights[q] * mp.det_j;
            double value = 0.0;
            for (int b = 0; b < 4; ++b) value += mp.basis.values[b] * u_new.values[static_cast<Eigen::Index>(c[b])];
            source += problem.source_at(e, mp.x, t_new) * w;
            sink += problem.sink_at(e, mp.x, t_new) * value * w;
        }
    }
    const double rate = (field_integral(mesh, u_new) - field_integral(mesh, u_old)) / dt;
    const double scale = std::max({std::abs(source), std::abs(sink), std::abs(rate), 1e-30});
    return std::abs(rate - source + sink) / scale;
}

void DiagnosticsSeries::append(DiagnosticsRecord record) {
    if (!records_.empty() && record.time < records_.back().time) {
        throw InvalidArgument("DiagnosticsSeries: time stamps must be non-decreasing");
    }
    records_.push_back(std::move(record));
}

} // namespace ddvf
