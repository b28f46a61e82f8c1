#include "ddvf/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "ddvf/errors.hpp"

namespace ddvf {

namespace {

bool is_aligned(double width, int n, double length) {
    const double cells = width * n / length;
    return std::abs(cells - std::round(cells)) < 1e-9;
}

} // namespace

StructuredQuadMesh::StructuredQuadMesh(int nx, int ny, double length, double well_width)
    : nx_(nx), ny_(ny), length_(length), well_width_(well_width) {
    if (nx < 2 || ny < 2) {
        throw InvalidArgument("build_structured_mesh: nx and ny must be >= 2");
    }
    if (!(length > 0.0) || !std::isfinite(length)) {
        throw InvalidArgument("build_structured_mesh: L must be positive");
    }
    if (!(well_width > 0.0)) {
        throw InvalidArgument("build_structured_mesh: W must be positive");
    }
    if (well_width >= 0.5 * length) {
        throw InvalidArgument("build_structured_mesh: W must be smaller than L/2");
    }
    if (!is_aligned(well_width, nx, length) || !is_aligned(well_width, ny, length)) {
        std::ostringstream msg;
        msg << "well width " << well_width << " is not a multiple of the element size;"
            << " wells are classified by element centroid";
        warnings_.push_back(msg.str());
    }

    const int n9x = 2 * nx + 1;
    const int n9y = 2 * ny + 1;
    q9_nodes_.reserve(static_cast<Index>(n9x) * static_cast<Index>(n9y));
    for (int j = 0; j < n9y; ++j) {
        const double y = length * j / (2.0 * ny);
        for (int i = 0; i < n9x; ++i) {
            q9_nodes_.emplace_back(length * i / (2.0 * nx), y);
        }
    }
    corner_nodes_.reserve(static_cast<Index>(nx + 1) * static_cast<Index>(ny + 1));
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            corner_nodes_.push_back(q9_nodes_[q9_node(2 * i, 2 * j)]);
        }
    }

    const Index ne = static_cast<Index>(nx) * static_cast<Index>(ny);
    conn_q4_.reserve(ne);
    conn_q9_.reserve(ne);
    tags_.reserve(ne);
    h_elem_.reserve(ne);
    const double w = well_width;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            conn_q4_.push_back({q4_node(i, j), q4_node(i + 1, j), q4_node(i + 1, j + 1), q4_node(i, j + 1)});
            const int a = 2 * i;
            const int b = 2 * j;
            conn_q9_.push_back({q9_node(a, b), q9_node(a + 2, b), q9_node(a + 2, b + 2), q9_node(a, b + 2),
                                q9_node(a + 1, b), q9_node(a + 2, b + 1), q9_node(a + 1, b + 2),
                                q9_node(a, b + 1), q9_node(a + 1, b + 1)});

            const Index e = conn_q4_.size() - 1;
            const Vec2 c = centroid(e);
            if (c.x() <= w && c.y() <= w) {
                tags_.push_back(SubdomainTag::Injection);
            } else if (c.x() >= length - w && c.y() >= length - w) {
                tags_.push_back(SubdomainTag::Production);
            } else {
                tags_.push_back(SubdomainTag::Interior);
            }

            const auto corners = element_corners(e);
            double h = 0.0;
            for (int k = 0; k < 4; ++k) {
                h = std::max(h, (corners[(k + 1) % 4] - corners[k]).norm());
            }
            h_elem_.push_back(h);
        }
    }

    boundary_edges_.reserve(2 * static_cast<Index>(nx + ny));
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const Index e = element(i, j);
            if (j == 0) boundary_edges_.push_back({e, 0, Vec2(0.0, -1.0)});
            if (i == nx - 1) boundary_edges_.push_back({e, 1, Vec2(1.0, 0.0)});
            if (j == ny - 1) boundary_edges_.push_back({e, 2, Vec2(0.0, 1.0)});
            if (i == 0) boundary_edges_.push_back({e, 3, Vec2(-1.0, 0.0)});
        }
    }
}

std::array<Vec2, 4> StructuredQuadMesh::element_corners(Index e) const {
    const auto& c = conn_q4_[e];
    return {corner_nodes_[c[0]], corner_nodes_[c[1]], corner_nodes_[c[2]], corner_nodes_[c[3]]};
}

Vec2 StructuredQuadMesh::centroid(Index e) const {
    const auto& c = conn_q4_[e];
    return 0.25 * (corner_nodes_[c[0]] + corner_nodes_[c[1]] + corner_nodes_[c[2]] + corner_nodes_[c[3]]);
}

std::vector<Index> StructuredQuadMesh::side_q4_nodes(Side side) const {
    std::vector<Index> nodes;
    switch (side) {
    case Side::Bottom:
        for (int i = 0; i <= nx_; ++i) nodes.push_back(q4_node(i, 0));
        break;
    case Side::Top:
        for (int i = 0; i <= nx_; ++i) nodes.push_back(q4_node(i, ny_));
        break;
    case Side::Left:
        for (int j = 0; j <= ny_; ++j) nodes.push_back(q4_node(0, j));
        break;
    case Side::Right:
        for (int j = 0; j <= ny_; ++j) nodes.push_back(q4_node(nx_, j));
        break;
    }
    return nodes;
}

std::vector<Index> StructuredQuadMesh::side_q9_nodes(Side side) const {
    std::vector<Index> nodes;
    switch (side) {
    case Side::Bottom:
        for (int i = 0; i <= 2 * nx_; ++i) nodes.push_back(q9_node(i, 0));
        break;
    case Side::Top:
        for (int i = 0; i <= 2 * nx_; ++i) nodes.push_back(q9_node(i, 2 * ny_));
        break;
    case Side::Left:
        for (int j = 0; j <= 2 * ny_; ++j) nodes.push_back(q9_node(0, j));
        break;
    case Side::Right:
        for (int j = 0; j <= 2 * ny_; ++j) nodes.push_back(q9_node(2 * nx_, j));
        break;
    }
    return nodes;
}

StructuredQuadMesh build_structured_mesh(int nx, int ny, double length, double well_width) {
    return StructuredQuadMesh(nx, ny, length, well_width);
}

std::vector<BoundaryEdge> boundary_edges(const StructuredQuadMesh& mesh) {
    return mesh.boundary_edges();
}

std::ostream& operator<<(std::ostream& os, const StructuredQuadMesh& mesh) {
    const auto count = [&](SubdomainTag t) {
        return std::count(mesh.tags().begin(), mesh.tags().end(), t);
    };
    os << "StructuredQuadMesh " << mesh.nx() << "x" << mesh.ny() << " on [0," << mesh.length() << "]^2: "
       << mesh.num_q4_nodes() << " Q4 nodes, " << mesh.num_q9_nodes() << " Q9 nodes, "
       << mesh.boundary_edges().size() << " boundary edges, " << count(SubdomainTag::Injection)
       << " injection / " << count(SubdomainTag::Production) << " production elements (W="
       << mesh.well_width() << ")";
    return os;
}

} // namespace ddvf
