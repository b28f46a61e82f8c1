#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace ddvf {

using Index = std::size_t;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

enum class SubdomainTag { Interior, Injection, Production };

/// Sides of the square domain, in the order of the local element edges.
enum class Side { Bottom = 0, Right = 1, Top = 2, Left = 3 };

struct BoundaryEdge {
    Index element;
    int local_edge;  // 0 bottom, 1 right, 2 top, 3 left
    Vec2 normal;
};

/// Structured quadrilateral mesh of [0,L]^2 with bilinear (Q4) and
/// biquadratic (Q9) node sets.
///
/// Nodes are ordered lexicographically by (y, x); elements row-major from
/// the bottom-left corner. Q4 corner node (i, j) coincides with Q9 node
/// (2i, 2j). Local node order is counter-clockwise from (-1,-1); for Q9 the
/// edge midpoints follow (bottom, right, top, left) and the centre is last.
class StructuredQuadMesh {
public:
    StructuredQuadMesh(int nx, int ny, double length, double well_width);

    [[nodiscard]] int nx() const noexcept { return nx_; }
    [[nodiscard]] int ny() const noexcept { return ny_; }
    [[nodiscard]] double length() const noexcept { return length_; }
    [[nodiscard]] double well_width() const noexcept { return well_width_; }
    [[nodiscard]] double hx() const noexcept { return length_ / nx_; }
    [[nodiscard]] double hy() const noexcept { return length_ / ny_; }

    [[nodiscard]] Index num_elements() const noexcept { return tags_.size(); }
    [[nodiscard]] Index num_q4_nodes() const noexcept { return corner_nodes_.size(); }
    [[nodiscard]] Index num_q9_nodes() const noexcept { return q9_nodes_.size(); }

    [[nodiscard]] const std::vector<Vec2>& corner_nodes() const noexcept { return corner_nodes_; }
    [[nodiscard]] const std::vector<Vec2>& q9_nodes() const noexcept { return q9_nodes_; }

    [[nodiscard]] const std::array<Index, 4>& elem_conn_q4(Index e) const { return conn_q4_[e]; }
    [[nodiscard]] const std::array<Index, 9>& elem_conn_q9(Index e) const { return conn_q9_[e]; }
    [[nodiscard]] std::array<Vec2, 4> element_corners(Index e) const;
    [[nodiscard]] Vec2 centroid(Index e) const;
    [[nodiscard]] double element_area(Index /*e*/) const noexcept { return hx() * hy(); }

    [[nodiscard]] SubdomainTag tag(Index e) const { return tags_[e]; }
    [[nodiscard]] const std::vector<SubdomainTag>& tags() const noexcept { return tags_; }

    /// Maximum edge length of element e.
    [[nodiscard]] double h_elem(Index e) const { return h_elem_[e]; }

    [[nodiscard]] const std::vector<BoundaryEdge>& boundary_edges() const noexcept { return boundary_edges_; }

    /// Q4 node index of grid point (i, j), 0 <= i <= nx, 0 <= j <= ny.
    [[nodiscard]] Index q4_node(int i, int j) const noexcept {
        return static_cast<Index>(j) * static_cast<Index>(nx_ + 1) + static_cast<Index>(i);
    }
    /// Q9 node index of grid point (i, j), 0 <= i <= 2nx, 0 <= j <= 2ny.
    [[nodiscard]] Index q9_node(int i, int j) const noexcept {
        return static_cast<Index>(j) * static_cast<Index>(2 * nx_ + 1) + static_cast<Index>(i);
    }
    [[nodiscard]] Index element(int i, int j) const noexcept {
        return static_cast<Index>(j) * static_cast<Index>(nx_) + static_cast<Index>(i);
    }

    /// Q4 nodes lying on a side, ordered along the side.
    [[nodiscard]] std::vector<Index> side_q4_nodes(Side side) const;
    /// Q9 nodes lying on a side, ordered along the side.
    [[nodiscard]] std::vector<Index> side_q9_nodes(Side side) const;

    /// Non-fatal construction notes, e.g. well squares not aligned with the grid.
    [[nodiscard]] const std::vector<std::string>& warnings() const noexcept { return warnings_; }

private:
    int nx_;
    int ny_;
    double length_;
    double well_width_;
    std::vector<Vec2> corner_nodes_;
    std::vector<Vec2> q9_nodes_;
    std::vector<std::array<Index, 4>> conn_q4_;
    std::vector<std::array<Index, 9>> conn_q9_;
    std::vector<SubdomainTag> tags_;
    std::vector<double> h_elem_;
    std::vector<BoundaryEdge> boundary_edges_;
    std::vector<std::string> warnings_;
};

StructuredQuadMesh build_structured_mesh(int nx, int ny, double length, double well_width);

std::vector<BoundaryEdge> boundary_edges(const StructuredQuadMesh& mesh);

/// One-paragraph human readable summary.
std::ostream& operator<<(std::ostream& os, const StructuredQuadMesh& mesh);

} // namespace ddvf
