#include "ddvf/fem.hpp"

#include <cmath>
#include <string>

#include <Eigen/LU>

#include "ddvf/errors.hpp"

namespace ddvf {

namespace {

const std::array<Vec2, 4> kQ4Nodes = {Vec2(-1, -1), Vec2(1, -1), Vec2(1, 1), Vec2(-1, 1)};

const std::array<Vec2, 9> kQ9Nodes = {Vec2(-1, -1), Vec2(1, -1), Vec2(1, 1), Vec2(-1, 1), Vec2(0, -1),
                                      Vec2(1, 0),   Vec2(0, 1),  Vec2(-1, 0), Vec2(0, 0)};

// 1D quadratic Lagrange polynomials on {-1, 0, 1}; `node` is the node coordinate.
struct Lagrange1d {
    double value;
    double d1;
    double d2;
};

Lagrange1d quadratic(double node, double s) {
    if (node < -0.5) return {0.5 * s * (s - 1.0), s - 0.5, 1.0};
    if (node > 0.5) return {0.5 * s * (s + 1.0), s + 0.5, 1.0};
    return {1.0 - s * s, -2.0 * s, -2.0};
}

Lagrange1d linear(double node, double s) {
    return {0.5 * (1.0 + node * s), 0.5 * node, 0.0};
}

constexpr double kRefTol = 1e-12;

} // namespace

std::span<const Vec2> reference_nodes(ElementKind kind) {
    if (kind == ElementKind::Bilinear4) return kQ4Nodes;
    return kQ9Nodes;
}

BasisValues eval_basis(ElementKind kind, double xi, double eta) {
    if (!(std::abs(xi) <= 1.0 + kRefTol) || !(std::abs(eta) <= 1.0 + kRefTol)) {
        throw InvalidArgument("eval_basis: point (" + std::to_string(xi) + ", " + std::to_string(eta) +
                              ") lies outside the reference square");
    }
    BasisValues out;
    const auto nodes = reference_nodes(kind);
    out.count = static_cast<int>(nodes.size());
    for (int a = 0; a < out.count; ++a) {
        const auto [fx, gx, hx] =
            kind == ElementKind::Bilinear4 ? linear(nodes[a].x(), xi) : quadratic(nodes[a].x(), xi);
        const auto [fy, gy, hy] =
            kind == ElementKind::Bilinear4 ? linear(nodes[a].y(), eta) : quadratic(nodes[a].y(), eta);
        out.values[a] = fx * fy;
        out.grads[a] = Vec2(gx * fy, fx * gy);
        out.hessians[a] << hx * fy, gx * gy, gx * gy, fx * hy;
    }
    return out;
}

void gauss_1d(int n, std::vector<double>& points, std::vector<double>& weights) {
    switch (n) {
    case 1:
        points = {0.0};
        weights = {2.0};
        break;
    case 2: {
        const double a = 1.0 / std::sqrt(3.0);
        points = {-a, a};
        weights = {1.0, 1.0};
        break;
    }
    case 3: {
        const double a = std::sqrt(3.0 / 5.0);
        points = {-a, 0.0, a};
        weights = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
        break;
    }
    case 4: {
        const double r = std::sqrt(6.0 / 5.0);
        const double a = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * r);
        const double b = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * r);
        const double wa = (18.0 + std::sqrt(30.0)) / 36.0;
        const double wb = (18.0 - std::sqrt(30.0)) / 36.0;
        points = {-b, -a, a, b};
        weights = {wb, wa, wa, wb};
        break;
    }
    default:
        throw InvalidArgument("gauss_rule: unsupported number of points per axis " + std::to_string(n));
    }
}

QuadratureRule gauss_rule(int n) {
    std::vector<double> p;
    std::vector<double> w;
    gauss_1d(n, p, w);
    QuadratureRule rule;
    rule.degree = 2 * n - 1;
    rule.points.reserve(p.size() * p.size());
    rule.weights.reserve(p.size() * p.size());
    for (std::size_t j = 0; j < p.size(); ++j) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            rule.points.emplace_back(p[i], p[j]);
            rule.weights.push_back(w[i] * w[j]);
        }
    }
    return rule;
}

MappedPoint isoparametric_map(std::span<const Vec2, 4> corners, ElementKind kind, const Vec2& ref) {
    const BasisValues geo = eval_basis(ElementKind::Bilinear4, ref.x(), ref.y());

    MappedPoint out;
    out.x.setZero();
    out.jacobian.setZero();
    Mat2 hess_x = Mat2::Zero();  // second derivatives of x(xi)
    Mat2 hess_y = Mat2::Zero();  // second derivatives of y(xi)
    for (int k = 0; k < 4; ++k) {
        out.x += geo.values[k] * corners[k];
        out.jacobian += corners[k] * geo.grads[k].transpose();
        hess_x += corners[k].x() * geo.hessians[k];
        hess_y += corners[k].y() * geo.hessians[k];
    }
    out.det_j = out.jacobian.determinant();
    if (!(out.det_j > 0.0)) {
        throw DegenerateElement("isoparametric_map: non-positive Jacobian determinant " +
                                std::to_string(out.det_j));
    }
    const Mat2 inv = out.jacobian.inverse();
    const Mat2 inv_t = inv.transpose();

    out.basis = kind == ElementKind::Bilinear4 ? geo : eval_basis(kind, ref.x(), ref.y());
    for (int a = 0; a < out.basis.count; ++a) {
        const Vec2 g = inv_t * out.basis.grads[a];
        const Mat2 h = out.basis.hessians[a] - g.x() * hess_x - g.y() * hess_y;
        out.basis.grads[a] = g;
        out.basis.hessians[a] = inv_t * h * inv;
    }
    return out;
}

} // namespace ddvf
