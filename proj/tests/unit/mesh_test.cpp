#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "ddvf/errors.hpp"
#include "ddvf/fem.hpp"
#include "ddvf/mesh.hpp"

using namespace ddvf;

TEST(Mesh, NodeCountsTenByTen) {
    const StructuredQuadMesh mesh(10, 10, 1.0, 0.1);
    EXPECT_EQ(mesh.num_q4_nodes(), 121u);
    EXPECT_EQ(mesh.num_q9_nodes(), 441u);
    EXPECT_EQ(mesh.num_elements(), 100u);
}

TEST(Mesh, NodeCountsRectangularGrid) {
    const StructuredQuadMesh mesh(7, 4, 2.0, 0.3);
    EXPECT_EQ(mesh.num_q4_nodes(), 8u * 5u);
    EXPECT_EQ(mesh.num_q9_nodes(), 15u * 9u);
}

TEST(Mesh, WellBlocksOnBenchmarkGrid) {
    const StructuredQuadMesh mesh(100, 100, 1.0, 0.1);
    // Brute-force centroid classification.
    std::size_t inj = 0;
    std::size_t prod = 0;
    for (int j = 0; j < 100; ++j) {
        for (int i = 0; i < 100; ++i) {
            const double cx = (i + 0.5) * 0.01;
            const double cy = (j + 0.5) * 0.01;
            const Index e = mesh.element(i, j);
            const bool in_inj = cx <= 0.1 && cy <= 0.1;
            const bool in_prod = cx >= 0.9 && cy >= 0.9;
            inj += in_inj;
            prod += in_prod;
            const SubdomainTag expected =
                in_inj ? SubdomainTag::Injection : (in_prod ? SubdomainTag::Production : SubdomainTag::Interior);
            ASSERT_EQ(mesh.tag(e), expected) << "element " << e;
        }
    }
    EXPECT_EQ(inj, 100u);
    EXPECT_EQ(prod, 100u);
    EXPECT_TRUE(mesh.warnings().empty());
}

TEST(Mesh, TaggedAreaIsTwiceWellSquare) {
    const StructuredQuadMesh mesh(40, 40, 2.0, 0.25);
    double area = 0.0;
    for (Index e = 0; e < mesh.num_elements(); ++e) {
        if (mesh.tag(e) != SubdomainTag::Interior) area += mesh.element_area(e);
    }
    EXPECT_NEAR(area, 2.0 * 0.25 * 0.25, 1e-14);
}

TEST(Mesh, MisalignedWellWidthWarns) {
    const StructuredQuadMesh mesh(10, 10, 1.0, 0.15);
    EXPECT_FALSE(mesh.warnings().empty());
}

TEST(Mesh, BoundaryEdgesCountAndNormals) {
    const StructuredQuadMesh mesh(10, 10, 1.0, 0.1);
    const auto& edges = mesh.boundary_edges();
    ASSERT_EQ(edges.size(), 40u);
    for (const BoundaryEdge& edge : edges) {
        EXPECT_DOUBLE_EQ(edge.normal.norm(), 1.0);
        // Outward: stepping from the centroid along the normal leaves the element towards the boundary.
        const Vec2 c = mesh.centroid(edge.element);
        const Vec2 out = c + edge.normal * 0.06;
        EXPECT_TRUE(out.x() < 0.0 || out.x() > 1.0 || out.y() < 0.0 || out.y() > 1.0);
    }
    EXPECT_EQ(boundary_edges(mesh).size(), 40u);
}

TEST(Mesh, AxisAlignedNormals) {
    const StructuredQuadMesh mesh(6, 6, 1.0, 0.1);
    for (const BoundaryEdge& edge : mesh.boundary_edges()) {
        const Vec2 c = mesh.centroid(edge.element);
        if (edge.local_edge == static_cast<int>(Side::Bottom)) {
            EXPECT_LT(c.y(), 1.0 / 6.0);
            EXPECT_EQ(edge.normal, Vec2(0.0, -1.0));
        }
        if (edge.local_edge == static_cast<int>(Side::Right)) {
            EXPECT_GT(c.x(), 5.0 / 6.0);
            EXPECT_EQ(edge.normal, Vec2(1.0, 0.0));
        }
    }
}

TEST(Mesh, CornerNodesCoincideWithQ9Nodes) {
    const StructuredQuadMesh mesh(13, 9, 1.7, 0.2);
    for (int j = 0; j <= 9; ++j) {
        for (int i = 0; i <= 13; ++i) {
            const Vec2& a = mesh.corner_nodes()[mesh.q4_node(i, j)];
            const Vec2& b = mesh.q9_nodes()[mesh.q9_node(2 * i, 2 * j)];
            ASSERT_EQ(a.x(), b.x());
            ASSERT_EQ(a.y(), b.y());
        }
    }
}

TEST(Mesh, LexicographicNodeOrder) {
    const StructuredQuadMesh mesh(5, 3, 1.0, 0.1);
    const auto& nodes = mesh.corner_nodes();
    for (std::size_t k = 1; k < nodes.size(); ++k) {
        const bool ordered =
            nodes[k - 1].y() < nodes[k].y() || (nodes[k - 1].y() == nodes[k].y() && nodes[k - 1].x() < nodes[k].x());
        EXPECT_TRUE(ordered) << k;
    }
}

TEST(Mesh, ElementLengthIsLargestSide) {
    const StructuredQuadMesh mesh(10, 4, 1.0, 0.1);
    for (Index e = 0; e < mesh.num_elements(); ++e) EXPECT_DOUBLE_EQ(mesh.h_elem(e), 0.25);
}

TEST(Mesh, PositiveJacobianAtQuadraturePoints) {
    const StructuredQuadMesh mesh(8, 5, 1.0, 0.1);
    const QuadratureRule rule = gauss_rule(3);
    for (Index e = 0; e < mesh.num_elements(); ++e) {
        const auto corners = mesh.element_corners(e);
        for (const Vec2& p : rule.points) {
            EXPECT_GT(isoparametric_map(corners, ElementKind::Bilinear4, p).det_j, 0.0);
        }
    }
}

TEST(Mesh, ConnectivityUsesEveryNode) {
    const StructuredQuadMesh mesh(4, 3, 1.0, 0.1);
    std::set<Index> q4;
    std::set<Index> q9;
    for (Index e = 0; e < mesh.num_elements(); ++e) {
        for (const Index n : mesh.elem_conn_q4(e)) q4.insert(n);
        for (const Index n : mesh.elem_conn_q9(e)) q9.insert(n);
    }
    EXPECT_EQ(q4.size(), mesh.num_q4_nodes());
    EXPECT_EQ(q9.size(), mesh.num_q9_nodes());
}

TEST(Mesh, Q9NodesSitAtReferencePositions) {
    const StructuredQuadMesh mesh(3, 2, 1.0, 0.1);
    const auto ref = reference_nodes(ElementKind::Biquadratic9);
    for (Index e = 0; e < mesh.num_elements(); ++e) {
        const auto corners = mesh.element_corners(e);
        const auto& conn = mesh.elem_conn_q9(e);
        for (int k = 0; k < 9; ++k) {
            const Vec2 x = isoparametric_map(corners, ElementKind::Bilinear4, ref[k]).x;
            EXPECT_NEAR((x - mesh.q9_nodes()[conn[k]]).norm(), 0.0, 1e-15);
        }
    }
}

TEST(Mesh, SideNodeLists) {
    const StructuredQuadMesh mesh(4, 3, 1.0, 0.1);
    EXPECT_EQ(mesh.side_q4_nodes(Side::Bottom).size(), 5u);
    EXPECT_EQ(mesh.side_q4_nodes(Side::Left).size(), 4u);
    EXPECT_EQ(mesh.side_q9_nodes(Side::Top).size(), 9u);
    for (const Index n : mesh.side_q9_nodes(Side::Right)) EXPECT_DOUBLE_EQ(mesh.q9_nodes()[n].x(), 1.0);
}

TEST(Mesh, Deterministic) {
    const StructuredQuadMesh a(9, 7, 1.3, 0.2);
    const StructuredQuadMesh b = build_structured_mesh(9, 7, 1.3, 0.2);
    std::ostringstream sa;
    std::ostringstream sb;
    sa << a;
    sb << b;
    EXPECT_EQ(sa.str(), sb.str());
    EXPECT_EQ(a.q9_nodes(), b.q9_nodes());
}

TEST(Mesh, RejectsInvalidDimensions) {
    EXPECT_THROW(StructuredQuadMesh(1, 10, 1.0, 0.1), InvalidArgument);
    EXPECT_THROW(StructuredQuadMesh(10, 0, 1.0, 0.1), InvalidArgument);
    EXPECT_THROW(StructuredQuadMesh(10, 10, 0.0, 0.1), InvalidArgument);
    EXPECT_THROW(StructuredQuadMesh(10, 10, 1.0, -0.1), InvalidArgument);
    EXPECT_THROW(StructuredQuadMesh(10, 10, 1.0, 0.5), InvalidArgument);
}
