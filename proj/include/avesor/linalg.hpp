#ifndef AVESOR_LINALG_HPP
#define AVESOR_LINALG_HPP

// Square real matrices in CSR form, factor-once/solve-many, and the
// sign/diagonal helpers used by the absolute value equation reformulation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "avesor/error.hpp"

namespace avesor {

using Vector = Eigen::VectorXd;

enum class SymmetryHint { general, symmetric_positive_definite };

/// Below this order factorizations run on a dense copy.
inline constexpr int dense_threshold = 64;

namespace detail {

inline void require_same_length(const Vector& a, const Vector& b, const char* where)
{
    if (a.size() != b.size()) {
        throw error(errc::invalid_dimension,
                    std::string(where) + ": length mismatch (" + std::to_string(a.size()) + " vs "
                        + std::to_string(b.size()) + ")");
    }
}

inline bool all_finite(const Vector& v) { return v.allFinite(); }

} // namespace detail

struct MatrixEntry {
    int row;
    int col;
    double value;
};

/// Square matrix A of order n stored as compressed sparse rows.
///
/// Entries are sorted by (row, column), unique, finite; explicit zeros are
/// dropped on construction.
class Matrix {
public:
    using Storage = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

    Matrix() = default;

    static Matrix from_entries(int n, std::vector<MatrixEntry> entries,
                               SymmetryHint hint = SymmetryHint::general)
    {
        if (n <= 0) {
            throw error(errc::invalid_dimension, "matrix order must be positive");
        }
        std::sort(entries.begin(), entries.end(), [](const MatrixEntry& a, const MatrixEntry& b) {
            return std::tie(a.row, a.col) < std::tie(b.row, b.col);
        });
        std::vector<Eigen::Triplet<double, int>> triplets;
        triplets.reserve(entries.size());
        for (std::size_t k = 0; k < entries.size(); ++k) {
            const auto& e = entries[k];
            if (e.row < 0 || e.row >= n || e.col < 0 || e.col >= n) {
                throw error(errc::invalid_dimension, "entry (" + std::to_string(e.row) + ", "
                                                         + std::to_string(e.col) + ") outside "
                                                         + std::to_string(n) + "x" + std::to_string(n));
            }
            if (!std::isfinite(e.value)) {
                throw error(errc::domain_error, "non-finite matrix entry");
            }
            if (k > 0 && entries[k - 1].row == e.row && entries[k - 1].col == e.col) {
                throw error(errc::invalid_dimension, "duplicate entry (" + std::to_string(e.row) + ", "
                                                         + std::to_string(e.col) + ")");
            }
            if (e.value != 0.0) triplets.emplace_back(e.row, e.col, e.value);
        }
        Matrix m;
        m.a_.resize(n, n);
        m.a_.setFromTriplets(triplets.begin(), triplets.end());
        m.a_.makeCompressed();
        m.hint_ = hint;
        return m;
    }

    static Matrix from_dense(const Eigen::MatrixXd& dense, SymmetryHint hint = SymmetryHint::general)
    {
        if (dense.rows() != dense.cols() || dense.rows() == 0) {
            throw error(errc::invalid_dimension, "matrix must be square and non-empty");
        }
        std::vector<MatrixEntry> entries;
        for (int i = 0; i < dense.rows(); ++i)
            for (int j = 0; j < dense.cols(); ++j)
                if (dense(i, j) != 0.0 || !std::isfinite(dense(i, j))) entries.push_back({i, j, dense(i, j)});
        return from_entries(static_cast<int>(dense.rows()), std::move(entries), hint);
    }

    static Matrix identity(int n)
    {
        std::vector<MatrixEntry> entries;
        for (int i = 0; i < n; ++i) entries.push_back({i, i, 1.0});
        return from_entries(n, std::move(entries), SymmetryHint::symmetric_positive_definite);
    }

    int n() const noexcept { return static_cast<int>(a_.rows()); }
    SymmetryHint hint() const noexcept { return hint_; }
    bool spd_hint() const noexcept { return hint_ == SymmetryHint::symmetric_positive_definite; }
    std::size_t nnz() const noexcept { return static_cast<std::size_t>(a_.nonZeros()); }

    const Storage& storage() const noexcept { return a_; }

    std::span<const int> row_pointers() const { return {a_.outerIndexPtr(), static_cast<std::size_t>(n()) + 1}; }
    std::span<const int> column_indices() const { return {a_.innerIndexPtr(), nnz()}; }
    std::span<const double> values() const { return {a_.valuePtr(), nnz()}; }

    double operator()(int i, int j) const { return a_.coeff(i, j); }

    Eigen::MatrixXd to_dense() const { return Eigen::MatrixXd(a_); }

    std::vector<MatrixEntry> entries() const
    {
        std::vector<MatrixEntry> out;
        out.reserve(nnz());
        for (int i = 0; i < a_.outerSize(); ++i)
            for (Storage::InnerIterator it(a_, i); it; ++it) out.push_back({i, static_cast<int>(it.col()), it.value()});
        return out;
    }

    Vector multiply(const Vector& x) const
    {
        if (x.size() != n()) throw error(errc::invalid_dimension, "multiply: length mismatch");
        return a_ * x;
    }

    Vector multiply_transpose(const Vector& x) const
    {
        if (x.size() != n()) throw error(errc::invalid_dimension, "multiply_transpose: length mismatch");
        return a_.transpose() * x;
    }

    /// A - diag(d); the result carries a general hint.
    Matrix minus_diagonal(const Vector& d) const
    {
        if (d.size() != n()) throw error(errc::invalid_dimension, "minus_diagonal: length mismatch");
        Matrix m;
        Storage diag(n(), n());
        std::vector<Eigen::Triplet<double, int>> t;
        for (int i = 0; i < n(); ++i)
            if (d[i] != 0.0) t.emplace_back(i, i, d[i]);
        diag.setFromTriplets(t.begin(), t.end());
        m.a_ = a_ - diag;
        m.a_.prune(0.0);
        m.a_.makeCompressed();
        m.hint_ = SymmetryHint::general;
        return m;
    }

    bool is_symmetric() const
    {
        Storage t = a_.transpose();
        return (Storage(a_ - t)).norm() == 0.0;
    }

    /// Symmetric with positive diagonal and strict row diagonal dominance,
    /// which is sufficient (Gershgorin) for positive definiteness.
    bool is_symmetric_diagonally_dominant() const
    {
        if (!is_symmetric()) return false;
        for (int i = 0; i < a_.outerSize(); ++i) {
            double diag = 0.0, off = 0.0;
            for (Storage::InnerIterator it(a_, i); it; ++it) {
                if (it.col() == i) diag = it.value();
                else off += std::abs(it.value());
            }
            if (!(diag > off)) return false;
        }
        return true;
    }

    Matrix with_hint(SymmetryHint hint) const
    {
        Matrix m = *this;
        m.hint_ = hint;
        return m;
    }

    friend bool operator==(const Matrix& a, const Matrix& b)
    {
        if (a.n() != b.n() || a.nnz() != b.nnz()) return false;
        return std::ranges::equal(a.row_pointers(), b.row_pointers())
            && std::ranges::equal(a.column_indices(), b.column_indices())
            && std::ranges::equal(a.values(), b.values());
    }

private:
    Storage a_;
    SymmetryHint hint_ = SymmetryHint::general;
};

/// n x n matrix with constant sub-, main and super-diagonal.
inline Matrix tridiag(int n, double sub, double diag, double sup)
{
    if (n <= 0) throw error(errc::invalid_dimension, "tridiag: order must be positive");
    std::vector<MatrixEntry> e;
    e.reserve(3 * static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        if (i > 0) e.push_back({i, i - 1, sub});
        e.push_back({i, i, diag});
        if (i + 1 < n) e.push_back({i, i + 1, sup});
    }
    const bool spd = sub == sup && diag > std::abs(sub) + std::abs(sup);
    return Matrix::from_entries(n, std::move(e), spd ? SymmetryHint::symmetric_positive_definite : SymmetryHint::general);
}

/// Tridiag(-I, block, -I) with m diagonal blocks; order m*m.
inline Matrix block_tridiag(int m, const Matrix& block)
{
    if (m <= 0) throw error(errc::invalid_dimension, "block_tridiag: block count must be positive");
    if (block.n() != m) {
        throw error(errc::invalid_dimension, "block_tridiag: block must be " + std::to_string(m) + "x"
                                                 + std::to_string(m) + ", got order " + std::to_string(block.n()));
    }
    const auto be = block.entries();
    std::vector<MatrixEntry> e;
    e.reserve(static_cast<std::size_t>(m) * (be.size() + 2 * static_cast<std::size_t>(m)));
    for (int bi = 0; bi < m; ++bi) {
        const int off = bi * m;
        for (const auto& x : be) e.push_back({off + x.row, off + x.col, x.value});
        for (int k = 0; k < m; ++k) {
            if (bi > 0) e.push_back({off + k, off - m + k, -1.0});
            if (bi + 1 < m) e.push_back({off + k, off + m + k, -1.0});
        }
    }
    Matrix a = Matrix::from_entries(m * m, std::move(e));
    return a.is_symmetric_diagonally_dominant() ? a.with_hint(SymmetryHint::symmetric_positive_definite) : a;
}

enum class FactorKind { cholesky, lu };

/// Reusable factorization of a nonsingular matrix.  Immutable and cheap to
/// copy (the factor data is shared).
class Factorization {
public:
    FactorKind kind() const noexcept { return kind_; }
    int n() const noexcept { return n_; }
    bool dense() const noexcept { return impl_->index() < 2; }

    Vector solve(const Vector& r) const { return apply(r, false); }

    /// Solves A^T y = r with the same factors.
    Vector solve_transpose(const Vector& r) const { return apply(r, true); }

private:
    using SparseCol = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
    using Impl = std::variant<Eigen::LLT<Eigen::MatrixXd>, Eigen::PartialPivLU<Eigen::MatrixXd>,
                              Eigen::SimplicialLLT<SparseCol>, Eigen::SparseLU<SparseCol, Eigen::COLAMDOrdering<int>>>;

    Factorization(FactorKind kind, int n, std::shared_ptr<Impl> impl) : kind_(kind), n_(n), impl_(std::move(impl)) {}

    Vector apply(const Vector& r, bool transpose) const
    {
        if (r.size() != n_) {
            throw error(errc::invalid_dimension, "solve: right-hand side has length " + std::to_string(r.size())
                                                     + ", expected " + std::to_string(n_));
        }
        Vector y = std::visit(
            [&](auto& f) -> Vector {
                using F = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<F, Eigen::LLT<Eigen::MatrixXd>> || std::is_same_v<F, Eigen::SimplicialLLT<SparseCol>>) {
                    return f.solve(r);
                } else {
                    if (transpose) return f.transpose().solve(r);
                    return f.solve(r);
                }
            },
            *impl_);
        if (!y.allFinite()) throw error(errc::numerical_breakdown, "solve produced non-finite values");
        return y;
    }

    FactorKind kind_ = FactorKind::lu;
    int n_ = 0;
    std::shared_ptr<Impl> impl_;

    friend Factorization factorize(const Matrix& a);
    friend Factorization factorize(const Matrix& a, FactorKind kind);
};

/// Factors A with the requested kind.  Cholesky breakdown raises
/// not_positive_definite; a (numerically) zero pivot raises singular_matrix.
inline Factorization factorize(const Matrix& a, FactorKind kind)
{
    const int n = a.n();
    if (n <= 0) throw error(errc::invalid_dimension, "factorize: empty matrix");
    using SparseCol = Factorization::SparseCol;
    using Impl = Factorization::Impl;

    if (n < dense_threshold) {
        const Eigen::MatrixXd d = a.to_dense();
        if (kind == FactorKind::cholesky) {
            auto impl = std::make_shared<Impl>(std::in_place_index<0>, d);
            if (std::get<0>(*impl).info() != Eigen::Success) {
                throw error(errc::not_positive_definite, "Cholesky factorization broke down");
            }
            return {kind, n, std::move(impl)};
        }
        auto impl = std::make_shared<Impl>(std::in_place_index<1>, d);
        const auto& lu = std::get<1>(*impl);
        const Eigen::VectorXd piv = lu.matrixLU().diagonal().cwiseAbs();
        const double big = piv.maxCoeff();
        if (!(big > 0.0) || piv.minCoeff() <= big * n * std::numeric_limits<double>::epsilon()) {
            throw error(errc::singular_matrix, "matrix is numerically singular");
        }
        return {kind, n, std::move(impl)};
    }

    SparseCol col = a.storage();
    col.makeCompressed();
    {
        // Sparse LU does not cope with structurally empty rows or columns.
        std::vector<char> row_used(static_cast<std::size_t>(n), 0);
        for (int j = 0; j < n; ++j) {
            bool any = false;
            for (SparseCol::InnerIterator it(col, j); it; ++it) {
                any = true;
                row_used[static_cast<std::size_t>(it.row())] = 1;
            }
            if (!any) throw error(errc::singular_matrix, "matrix has an empty column");
        }
        if (std::find(row_used.begin(), row_used.end(), 0) != row_used.end()) {
            throw error(errc::singular_matrix, "matrix has an empty row");
        }
    }
    if (kind == FactorKind::cholesky) {
        auto impl = std::make_shared<Impl>(std::in_place_index<2>);
        auto& llt = std::get<2>(*impl);
        llt.compute(col);
        if (llt.info() != Eigen::Success) {
            throw error(errc::not_positive_definite, "Cholesky factorization broke down");
        }
        return {kind, n, std::move(impl)};
    }
    auto impl = std::make_shared<Impl>(std::in_place_index<3>);
    auto& lu = std::get<3>(*impl);
    lu.analyzePattern(col);
    lu.factorize(col);
    if (lu.info() != Eigen::Success) {
        throw error(errc::singular_matrix, "sparse LU failed: " + lu.lastErrorMessage());
    }
    return {kind, n, std::move(impl)};
}

/// Cholesky when the SPD hint is set, LU with partial pivoting otherwise.
inline Factorization factorize(const Matrix& a)
{
    return factorize(a, a.spd_hint() ? FactorKind::cholesky : FactorKind::lu);
}

inline Vector solve(const Factorization& f, const Vector& r) { return f.solve(r); }

/// diag(sgn(x)) * v with sgn(0) = 0.
inline Vector sign_diag_apply(const Vector& x, const Vector& v)
{
    detail::require_same_length(x, v, "sign_diag_apply");
    Vector out(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double s = x[i] > 0.0 ? 1.0 : (x[i] < 0.0 ? -1.0 : 0.0);
        out[i] = s * v[i];
    }
    return out;
}

inline Vector sign_vector(const Vector& x) { return sign_diag_apply(x, Vector::Ones(x.size())); }

inline double norm2(const Vector& v) { return v.norm(); }

} // namespace avesor

#endif // AVESOR_LINALG_HPP
