#include "ddvf/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <ostream>
#include <stdexcept>
#include <string>

#include <Eigen/SparseLU>
#ifdef DDVF_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

#include "ddvf/errors.hpp"

namespace ddvf {

namespace {

using ColMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

constexpr double kResidualTarget = 1e-10;
constexpr int kMaxRefinements = 8;
// Accepted when the relative residual is above target only because |A||x|
// dwarfs |b|: the computed x then solves a neighbouring system to rounding.
constexpr double kBackwardErrorTarget = 64.0 * std::numeric_limits<double>::epsilon();
constexpr int kEquilibrationPasses = 5;

std::ptrdiff_t trailing_integer(const std::string& s) {
    const auto pos = s.find_last_not_of("0123456789");
    if (pos == std::string::npos || pos + 1 >= s.size()) return -1;
    return std::strtoll(s.c_str() + pos + 1, nullptr, 10);
}

// Symmetric Ruiz scaling: d such that diag(d) A diag(d) has rows and columns of
// unit max-norm. Keeps symmetric systems symmetric.
Eigen::VectorXd ruiz_scaling(const ColMatrix& a) {
    Eigen::VectorXd d = Eigen::VectorXd::Ones(a.rows());
    Eigen::VectorXd row_max(a.rows());
    Eigen::VectorXd col_max(a.cols());
    for (int pass = 0; pass < kEquilibrationPasses; ++pass) {
        row_max.setZero();
        col_max.setZero();
        for (int col = 0; col < a.outerSize(); ++col) {
            for (ColMatrix::InnerIterator it(a, col); it; ++it) {
                const double v = std::abs(it.value() * d[it.row()] * d[col]);
                row_max[it.row()] = std::max(row_max[it.row()], v);
                col_max[col] = std::max(col_max[col], v);
            }
        }
        for (Eigen::Index i = 0; i < d.size(); ++i) {
            const double m = std::max(row_max[i], col_max[i]);
            if (m > 0.0) d[i] /= std::sqrt(m);
        }
    }
    return d;
}

} // namespace

SparseSystem::SparseSystem(Index n) : n_(n), matrix_(static_cast<int>(n), static_cast<int>(n)), rhs_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n))) {}

void SparseSystem::scatter_add(const Eigen::Ref<const Eigen::MatrixXd>& local, std::span<const Index> rows,
                               std::span<const Index> cols) {
    if (static_cast<Index>(local.rows()) != rows.size() || static_cast<Index>(local.cols()) != cols.size()) {
        throw std::out_of_range("scatter_add: local matrix does not match the index map");
    }
    for (const Index r : rows) {
        if (r >= n_) throw std::out_of_range("scatter_add: row index " + std::to_string(r) + " out of range");
    }
    for (const Index c : cols) {
        if (c >= n_) throw std::out_of_range("scatter_add: column index " + std::to_string(c) + " out of range");
    }
    for (Eigen::Index i = 0; i < local.rows(); ++i) {
        for (Eigen::Index j = 0; j < local.cols(); ++j) {
            pending_.emplace_back(static_cast<int>(rows[i]), static_cast<int>(cols[j]), local(i, j));
        }
    }
}

void SparseSystem::add(Index row, Index col, double value) {
    if (row >= n_ || col >= n_) throw std::out_of_range("SparseSystem::add: index out of range");
    pending_.emplace_back(static_cast<int>(row), static_cast<int>(col), value);
}

void SparseSystem::constrain(Index dof, double value) {
    if (dof >= n_) throw std::out_of_range("SparseSystem::constrain: dof out of range");
    constraints_[dof] = value;
}

void SparseSystem::set_mean_zero_gauge(Index first, Index count) {
    if (count == 0 || first + count > n_) throw std::out_of_range("set_mean_zero_gauge: block out of range");
    gauge_ = Gauge{first, count};
}

void SparseSystem::compress() {
    if (pending_.empty()) return;
    SparseMatrix added(static_cast<int>(n_), static_cast<int>(n_));
    added.setFromTriplets(pending_.begin(), pending_.end());
    pending_.clear();
    pending_.shrink_to_fit();
    if (matrix_.nonZeros() == 0) {
        matrix_ = std::move(added);
    } else {
        matrix_ = matrix_ + added;
    }
}

const SparseMatrix& SparseSystem::matrix() {
    compress();
    return matrix_;
}

double SparseSystem::coeff(Index row, Index col) {
    compress();
    return matrix_.coeff(static_cast<int>(row), static_cast<int>(col));
}

SparseMatrix SparseSystem::constrained_matrix(Eigen::VectorXd& rhs_out) {
    compress();
    const Index m = n_ + (gauge_ ? 1 : 0);
    rhs_out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
    rhs_out.head(static_cast<Eigen::Index>(n_)) = rhs_;

    std::vector<char> fixed(n_, 0);
    std::vector<double> fixed_value(n_, 0.0);
    for (const auto& [dof, value] : constraints_) {
        fixed[dof] = 1;
        fixed_value[dof] = value;
    }

    std::vector<Eigen::Triplet<double, int>> entries;
    entries.reserve(static_cast<std::size_t>(matrix_.nonZeros()) + constraints_.size() +
                    (gauge_ ? 2 * gauge_->count : 0));
    for (int row = 0; row < matrix_.outerSize(); ++row) {
        if (fixed[row]) continue;
        for (SparseMatrix::InnerIterator it(matrix_, row); it; ++it) {
            if (fixed[it.col()]) {
                rhs_out[row] -= it.value() * fixed_value[it.col()];
            } else {
                entries.emplace_back(row, it.col(), it.value());
            }
        }
    }
    for (const auto& [dof, value] : constraints_) {
        entries.emplace_back(static_cast<int>(dof), static_cast<int>(dof), 1.0);
        rhs_out[static_cast<Eigen::Index>(dof)] = value;
    }
    if (gauge_) {
        const int g = static_cast<int>(n_);
        for (Index k = gauge_->first; k < gauge_->first + gauge_->count; ++k) {
            if (fixed[k]) {
                rhs_out[g] -= fixed_value[k];
                continue;
            }
            entries.emplace_back(g, static_cast<int>(k), 1.0);
            entries.emplace_back(static_cast<int>(k), g, 1.0);
        }
    }
    SparseMatrix out(static_cast<int>(m), static_cast<int>(m));
    out.setFromTriplets(entries.begin(), entries.end());
    return out;
}

void SparseSystem::write_coordinate(std::ostream& os) {
    compress();
    for (int row = 0; row < matrix_.outerSize(); ++row) {
        for (SparseMatrix::InnerIterator it(matrix_, row); it; ++it) {
            os << row << ' ' << it.col() << ' ' << it.value() << '\n';
        }
    }
}

struct LinearSolver::Impl {
#ifdef DDVF_HAVE_UMFPACK
    Eigen::UmfPackLU<ColMatrix> lu;
#else
    Eigen::SparseLU<ColMatrix, Eigen::COLAMDOrdering<int>> lu;
#endif
    std::vector<int> outer;
    std::vector<int> inner;
    bool analyzed = false;

    bool same_pattern(const ColMatrix& a) const {
        return analyzed && static_cast<std::size_t>(a.outerSize() + 1) == outer.size() &&
               static_cast<std::size_t>(a.nonZeros()) == inner.size() &&
               std::equal(outer.begin(), outer.end(), a.outerIndexPtr()) &&
               std::equal(inner.begin(), inner.end(), a.innerIndexPtr());
    }

    void remember_pattern(const ColMatrix& a) {
        outer.assign(a.outerIndexPtr(), a.outerIndexPtr() + a.outerSize() + 1);
        inner.assign(a.innerIndexPtr(), a.innerIndexPtr() + a.nonZeros());
        analyzed = true;
    }
};

LinearSolver::LinearSolver() : impl_(std::make_unique<Impl>()) {
#ifdef DDVF_HAVE_UMFPACK
    // Assembled systems are structurally symmetric; the unsymmetric ordering
    // picked by default on saddle-point blocks fills in badly.
    impl_->lu.umfpackControl()(UMFPACK_STRATEGY) = UMFPACK_STRATEGY_SYMMETRIC;
#endif
}
LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

Eigen::VectorXd LinearSolver::solve(SparseSystem& system) {
    Eigen::VectorXd b;
    const SparseMatrix a_rows = system.constrained_matrix(b);
    const Index n = system.size();

    // A row without a single non-zero makes the system singular at that index.
    for (int row = 0; row < a_rows.outerSize(); ++row) {
        bool any = false;
        for (SparseMatrix::InnerIterator it(a_rows, row); it; ++it) {
            if (it.value() != 0.0) {
                any = true;
                break;
            }
        }
        if (!any) {
            throw SingularSystem("solve: singular system, row " + std::to_string(row) + " is identically zero",
                                 row);
        }
    }

    ColMatrix a(a_rows);
    a.makeCompressed();
    const Eigen::VectorXd d = ruiz_scaling(a);
    ColMatrix scaled = d.asDiagonal() * a * d.asDiagonal();
    scaled.makeCompressed();

    auto& lu = impl_->lu;
    if (!impl_->same_pattern(scaled)) {
        lu.analyzePattern(scaled);
        impl_->remember_pattern(scaled);
    }
    lu.factorize(scaled);
    if (lu.info() != Eigen::Success) {
        impl_->analyzed = false;
        Eigen::SparseLU<ColMatrix, Eigen::COLAMDOrdering<int>> probe;
        probe.compute(scaled);
        const std::ptrdiff_t pivot = probe.info() == Eigen::Success ? -1 : trailing_integer(probe.lastErrorMessage()) - 1;
        throw SingularSystem("solve: factorization failed (singular or numerically rank-deficient system)" +
                                 (pivot >= 0 ? ", zero pivot at elimination step " + std::to_string(pivot)
                                             : std::string()),
                             pivot);
    }

    const double b_norm = b.norm();
    const auto apply_inverse = [&](const Eigen::VectorXd& rhs) -> Eigen::VectorXd {
        return d.cwiseProduct(lu.solve(Eigen::VectorXd(d.cwiseProduct(rhs))));
    };
    Eigen::VectorXd x = apply_inverse(b);
    if (!x.allFinite()) {
        throw SingularSystem("solve: non-finite solution, system is numerically singular", -1);
    }
    double rel = 0.0;
    double omega = 0.0;
    if (b_norm > 0.0) {
        const ColMatrix abs_a = a.cwiseAbs();
        Eigen::VectorXd r;
        const auto measure = [&] {
            r = b - a * x;
            rel = r.norm() / b_norm;
            const Eigen::VectorXd scale = abs_a * x.cwiseAbs() + b.cwiseAbs();
            omega = 0.0;
            for (Eigen::Index i = 0; i < r.size(); ++i) {
                if (scale[i] > 0.0) omega = std::max(omega, std::abs(r[i]) / scale[i]);
            }
        };
        const auto converged = [&] { return rel <= kResidualTarget || omega <= kBackwardErrorTarget; };
        measure();
        for (int pass = 0; pass < kMaxRefinements && !converged(); ++pass) {
            x += apply_inverse(r);
            measure();
        }
        if (!converged()) {
            std::ostringstream msg;
            msg << "solve: relative residual " << rel << " exceeds " << kResidualTarget
                << " and componentwise backward error " << omega << " exceeds " << kBackwardErrorTarget
                << " after iterative refinement";
            throw ConvergenceFailure(msg.str(), rel);
        }
    }
    last_backward_error_ = omega;
    last_residual_ = rel;

    for (const auto& [dof, value] : system.constraints()) {
        x[static_cast<Eigen::Index>(dof)] = value;
    }
    return x.head(static_cast<Eigen::Index>(n));
}

Eigen::VectorXd solve(SparseSystem& system) {
    LinearSolver solver;
    return solver.solve(system);
}

} // namespace ddvf
