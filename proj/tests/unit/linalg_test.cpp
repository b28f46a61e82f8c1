#include <gtest/gtest.h>

#include <sstream>
#include <stdexcept>

#include "ddvf/errors.hpp"
#include "ddvf/linalg.hpp"

using namespace ddvf;

TEST(SparseSystem, ScatterTwiceAccumulates) {
    SparseSystem s(5);
    Eigen::MatrixXd local(1, 1);
    local << 5.0;
    const std::array<Index, 1> map{3};
    s.scatter_add(local, map);
    s.scatter_add(local, map);
    EXPECT_DOUBLE_EQ(s.coeff(3, 3), 10.0);
}

TEST(SparseSystem, EmptyLocalLeavesSystemUnchanged) {
    SparseSystem s(3);
    s.add(0, 0, 1.0);
    const Eigen::MatrixXd empty(0, 0);
    s.scatter_add(empty, std::span<const Index>());
    EXPECT_EQ(s.matrix().nonZeros(), 1);
    EXPECT_DOUBLE_EQ(s.coeff(0, 0), 1.0);
}

TEST(SparseSystem, SharedNodeSumsContributions) {
    // Two 1D linear elements of length 1: stiffness [[1,-1],[-1,1]] each.
    SparseSystem s(3);
    Eigen::Matrix2d k;
    k << 1, -1, -1, 1;
    const std::array<Index, 2> e0{0, 1};
    const std::array<Index, 2> e1{1, 2};
    s.scatter_add(k, e0);
    s.scatter_add(k, e1);
    EXPECT_DOUBLE_EQ(s.coeff(1, 1), 2.0);
    EXPECT_DOUBLE_EQ(s.coeff(0, 1), -1.0);
    EXPECT_DOUBLE_EQ(s.coeff(1, 2), -1.0);
    EXPECT_DOUBLE_EQ(s.coeff(0, 2), 0.0);
}

TEST(SparseSystem, OutOfRangeIsLogicError) {
    SparseSystem s(2);
    Eigen::MatrixXd local = Eigen::MatrixXd::Ones(1, 1);
    const std::array<Index, 1> bad{2};
    EXPECT_THROW(s.scatter_add(local, bad), std::out_of_range);
    EXPECT_THROW(s.add(0, 5, 1.0), std::logic_error);
    EXPECT_THROW(s.constrain(2, 1.0), std::logic_error);
}

TEST(SparseSystem, CoordinateDump) {
    SparseSystem s(2);
    s.add(0, 1, 2.5);
    std::ostringstream os;
    s.write_coordinate(os);
    EXPECT_EQ(os.str(), "0 1 2.5\n");
}

TEST(Solve, Identity) {
    SparseSystem s(3);
    for (Index i = 0; i < 3; ++i) s.add(i, i, 1.0);
    s.rhs() << 1, 2, 3;
    const Eigen::VectorXd x = solve(s);
    EXPECT_DOUBLE_EQ(x[0], 1.0);
    EXPECT_DOUBLE_EQ(x[1], 2.0);
    EXPECT_DOUBLE_EQ(x[2], 3.0);
}

TEST(Solve, SaddlePermutation) {
    SparseSystem s(2);
    s.add(0, 1, 1.0);
    s.add(1, 0, 1.0);
    s.rhs() << 2, 5;
    const Eigen::VectorXd x = solve(s);
    EXPECT_NEAR(x[0], 5.0, 1e-15);
    EXPECT_NEAR(x[1], 2.0, 1e-15);
}

TEST(Solve, ZeroMatrixIsSingular) {
    SparseSystem s(3);
    s.rhs() << 1, 1, 1;
    EXPECT_THROW(solve(s), SingularSystem);
    try {
        solve(s);
    } catch (const SingularSystem& e) {
        EXPECT_GE(e.pivot(), 0);
    }
}

TEST(Solve, RankDeficientIsSingular) {
    SparseSystem s(2);
    Eigen::Matrix2d k;
    k << 1, 1, 1, 1;
    const std::array<Index, 2> map{0, 1};
    s.scatter_add(k, map);
    s.rhs() << 1, 2;
    EXPECT_THROW(solve(s), SingularSystem);
}

namespace {

// Pure-Neumann 1D Laplacian on n nodes: singular up to constants.
SparseSystem neumann_chain(Index n) {
    SparseSystem s(n);
    Eigen::Matrix2d k;
    k << 1, -1, -1, 1;
    for (Index e = 0; e + 1 < n; ++e) {
        const std::array<Index, 2> map{e, e + 1};
        s.scatter_add(k, map);
    }
    return s;
}

} // namespace

TEST(Solve, MeanZeroGauge) {
    const Index n = 9;
    SparseSystem s = neumann_chain(n);
    for (Index i = 0; i < n; ++i) s.rhs()[static_cast<Eigen::Index>(i)] = std::sin(0.7 * static_cast<double>(i));
    s.rhs().array() -= s.rhs().mean();  // compatible data
    s.set_mean_zero_gauge(0, n);
    const Eigen::VectorXd x = solve(s);
    EXPECT_LE(std::abs(x.mean()), 1e-12);
    SparseSystem check = neumann_chain(n);
    const Eigen::VectorXd r = check.matrix() * x - s.rhs();
    EXPECT_LE(r.norm(), 1e-12);
}

TEST(Solve, ConstraintsReproducedExactly) {
    const Index n = 6;
    SparseSystem s = neumann_chain(n);
    s.constrain(0, 0.1);
    s.constrain(n - 1, 0.7);
    const Eigen::VectorXd x = solve(s);
    EXPECT_EQ(x[0], 0.1);
    EXPECT_EQ(x[static_cast<Eigen::Index>(n - 1)], 0.7);
    // Linear interpolation between the ends.
    for (Index i = 0; i < n; ++i) {
        EXPECT_NEAR(x[static_cast<Eigen::Index>(i)], 0.1 + 0.6 * static_cast<double>(i) / (n - 1), 1e-14);
    }
}

TEST(Solve, ConstrainedEliminationIsSymmetric) {
    SparseSystem s = neumann_chain(5);
    s.constrain(2, 1.0);
    Eigen::VectorXd b;
    const SparseMatrix a = s.constrained_matrix(b);
    const Eigen::MatrixXd dense(a);
    EXPECT_EQ((dense - dense.transpose()).norm(), 0.0);
    EXPECT_DOUBLE_EQ(b[1], 1.0);  // moved column contribution
}

TEST(Solve, RepeatedSolveIsBitIdentical) {
    const Index n = 40;
    SparseSystem s = neumann_chain(n);
    for (Index i = 0; i < n; ++i) s.add(i, i, 0.1 * static_cast<double>(i % 3 + 1));
    for (Index i = 0; i < n; ++i) s.rhs()[static_cast<Eigen::Index>(i)] = std::cos(static_cast<double>(i));
    LinearSolver solver;
    const Eigen::VectorXd a = solver.solve(s);
    const Eigen::VectorXd b = solver.solve(s);
    EXPECT_EQ(a, b);
    EXPECT_LE(solver.last_residual(), 1e-10);
}

TEST(Solve, ZeroRightHandSide) {
    SparseSystem s(2);
    s.add(0, 0, 2.0);
    s.add(1, 1, 3.0);
    const Eigen::VectorXd x = solve(s);
    EXPECT_EQ(x.norm(), 0.0);
}
