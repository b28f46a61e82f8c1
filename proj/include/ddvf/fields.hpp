#pragma once

#include <Eigen/Core>

#include "ddvf/mesh.hpp"

namespace ddvf {

/// Nodal values of a scalar on the Q4 node set, with its time stamp.
struct ScalarField {
    Eigen::VectorXd values;
    double time = 0.0;
};

inline ScalarField constant_field(const StructuredQuadMesh& mesh, double value, double time = 0.0) {
    return {Eigen::VectorXd::Constant(static_cast<Eigen::Index>(mesh.num_q4_nodes()), value), time};
}

/// Interpolate a function of position at the Q4 nodes.
template <class F>
ScalarField interpolate_field(const StructuredQuadMesh& mesh, F&& f, double time = 0.0) {
    ScalarField out{Eigen::VectorXd(static_cast<Eigen::Index>(mesh.num_q4_nodes())), time};
    for (Index i = 0; i < mesh.num_q4_nodes(); ++i) {
        out.values[static_cast<Eigen::Index>(i)] = f(mesh.corner_nodes()[i]);
    }
    return out;
}

} // namespace ddvf
