#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "ddvf/mesh.hpp"

namespace ddvf {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Assembled linear system A x = b with Dirichlet constraints and an
/// optional zero-mean gauge on a contiguous block of unknowns.
///
/// Entries are accumulated as triplets and merged on `compress()`; merging
/// sums duplicates in insertion order, so identical assembly sequences give
/// bit-identical matrices.
class SparseSystem {
public:
    explicit SparseSystem(Index n);

    [[nodiscard]] Index size() const noexcept { return n_; }

    /// A[rows[i], cols[j]] += local(i, j). Throws std::out_of_range on a bad index.
    void scatter_add(const Eigen::Ref<const Eigen::MatrixXd>& local, std::span<const Index> rows,
                     std::span<const Index> cols);
    void scatter_add(const Eigen::Ref<const Eigen::MatrixXd>& local, std::span<const Index> map) {
        scatter_add(local, map, map);
    }
    void add(Index row, Index col, double value);

    [[nodiscard]] Eigen::VectorXd& rhs() noexcept { return rhs_; }
    [[nodiscard]] const Eigen::VectorXd& rhs() const noexcept { return rhs_; }

    /// Prescribe x[dof] = value. A later call for the same dof overwrites.
    void constrain(Index dof, double value);
    [[nodiscard]] const std::map<Index, double>& constraints() const noexcept { return constraints_; }

    /// Require the arithmetic mean of x[first .. first+count) to vanish. A
    /// Lagrange multiplier is appended to the system when it is solved.
    void set_mean_zero_gauge(Index first, Index count);
    [[nodiscard]] bool has_gauge() const noexcept { return gauge_.has_value(); }

    /// Merge pending triplets into the compressed matrix.
    void compress();
    /// Compressed matrix; pending triplets are merged first.
    [[nodiscard]] const SparseMatrix& matrix();
    [[nodiscard]] double coeff(Index row, Index col);

    /// Matrix actually factorized: constraints eliminated symmetrically and
    /// the gauge row/column appended. The matching right-hand side is
    /// returned through `rhs_out`.
    [[nodiscard]] SparseMatrix constrained_matrix(Eigen::VectorXd& rhs_out);

    /// Debug dump, one "row col value" line per stored entry (0-based).
    void write_coordinate(std::ostream& os);

private:
    struct Gauge {
        Index first;
        Index count;
    };

    Index n_;
    std::vector<Eigen::Triplet<double, int>> pending_;
    SparseMatrix matrix_;
    Eigen::VectorXd rhs_;
    std::map<Index, double> constraints_;
    std::optional<Gauge> gauge_;
};

/// Sparse direct solver. Re-uses the symbolic analysis while successive
/// systems keep the same sparsity pattern.
class LinearSolver {
public:
    LinearSolver();
    ~LinearSolver();
    LinearSolver(LinearSolver&&) noexcept;
    LinearSolver& operator=(LinearSolver&&) noexcept;

    /// Solve the constrained system. Post: relative residual of the solved
    /// (constrained) system <= 1e-10 when b != 0, or, when that is below the
    /// rounding floor of the system, componentwise backward error <= 64 eps.
    /// Constrained dofs exact.
    Eigen::VectorXd solve(SparseSystem& system);

    /// Relative residual of the last solve.
    [[nodiscard]] double last_residual() const noexcept { return last_residual_; }
    /// max_i |b - Ax|_i / (|A||x| + |b|)_i of the last solve.
    [[nodiscard]] double last_backward_error() const noexcept { return last_backward_error_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    double last_residual_ = 0.0;
    double last_backward_error_ = 0.0;
};

/// Convenience wrapper around a one-shot LinearSolver.
Eigen::VectorXd solve(SparseSystem& system);

} // namespace ddvf
