#pragma once

#include <array>
#include <span>
#include <vector>

#include "ddvf/mesh.hpp"

namespace ddvf {

enum class ElementKind { Bilinear4, Biquadratic9 };

[[nodiscard]] constexpr int num_nodes(ElementKind kind) noexcept {
    return kind == ElementKind::Bilinear4 ? 4 : 9;
}

/// Local node coordinates on [-1,1]^2 in the node order used by the mesh.
[[nodiscard]] std::span<const Vec2> reference_nodes(ElementKind kind);

/// Basis values with first and second derivatives. Only the first
/// `count` entries are meaningful. Derivatives are with respect to whatever
/// coordinates produced them (reference from eval_basis, physical from
/// isoparametric_map).
struct BasisValues {
    int count = 0;
    std::array<double, 9> values{};
    std::array<Vec2, 9> grads{};
    std::array<Mat2, 9> hessians{};
};

BasisValues eval_basis(ElementKind kind, double xi, double eta);

struct QuadratureRule {
    std::vector<Vec2> points;
    std::vector<double> weights;
    int degree = 0;  // exact for polynomials of this degree per axis

    [[nodiscard]] std::size_t size() const noexcept { return points.size(); }
};

/// Tensor-product Gauss-Legendre rule with n points per axis, n in {1,2,3,4}.
QuadratureRule gauss_rule(int n);

/// One-dimensional Gauss-Legendre points and weights on [-1,1].
void gauss_1d(int n, std::vector<double>& points, std::vector<double>& weights);

struct MappedPoint {
    Vec2 x;
    Mat2 jacobian;  // jacobian(i, j) = dx_i / dxi_j
    double det_j = 0.0;
    BasisValues basis;  // physical gradients and hessians
};

/// Bilinear geometry map of a quadrilateral given by its four corners
/// (counter-clockwise), evaluated at reference point `ref`, with the basis
/// of `kind` pushed forward to physical coordinates.
MappedPoint isoparametric_map(std::span<const Vec2, 4> corners, ElementKind kind, const Vec2& ref);

} // namespace ddvf
