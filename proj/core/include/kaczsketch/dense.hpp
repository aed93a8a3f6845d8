#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace kaczsketch {

/// Plain dense real vector. Finiteness is enforced at the API boundaries
/// that construct systems (problem generation, file loading, solve entry).
using RealVector = std::vector<double>;

/// Throws std::invalid_argument if any entry is NaN or infinite.
void ensure_finite(const RealVector& v, const char* what);

/// Dense row-major real matrix. Row access is contiguous, which is what the
/// row-action solvers stream. Entries are validated finite at construction.
class DenseMatrix {
public:
    DenseMatrix(std::size_t rows, std::size_t cols);
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

    static DenseMatrix identity(std::size_t n);
    static DenseMatrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double operator()(std::size_t i, std::size_t j) const {
        return entries_[i * cols_ + j];
    }
    double& operator()(std::size_t i, std::size_t j) {
        return entries_[i * cols_ + j];
    }

    std::span<const double> row(std::size_t i) const {
        return {entries_.data() + i * cols_, cols_};
    }
    std::span<double> row(std::size_t i) {
        return {entries_.data() + i * cols_, cols_};
    }

    const std::vector<double>& entries() const { return entries_; }
    std::vector<double>& entries() { return entries_; }

    /// Re-checks the finiteness invariant (used after in-place fills).
    void validate() const;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> entries_;
};

/// Per-row squared Euclidean norms plus their sum (= squared Frobenius norm).
struct RowNormCache {
    RealVector normsSq;
    double sumSq = 0.0;

    std::size_t size() const { return normsSq.size(); }
    double operator[](std::size_t i) const { return normsSq[i]; }
};

RowNormCache row_norms_squared(const DenseMatrix& A);

/// b - A*x. Dimension mismatch throws.
RealVector residual(const DenseMatrix& A, const RealVector& x, const RealVector& b);

/// Sum of squares of all entries.
double frobenius_norm_sq(const DenseMatrix& A);

/// Smallest singular value above the numerical-rank threshold
/// max(rows, cols) * sigma_max * 1e-12. Full SVD; desk-scale matrices only.
/// Throws on an all-zero matrix.
double smallest_nonzero_singular_value(const DenseMatrix& A);

// Small kernels shared by the solvers.
double dot(std::span<const double> a, std::span<const double> b);
double norm_sq(std::span<const double> a);
void matvec(const DenseMatrix& A, const RealVector& x, RealVector& out);
RealVector matvec(const DenseMatrix& A, const RealVector& x);

}  // namespace kaczsketch
