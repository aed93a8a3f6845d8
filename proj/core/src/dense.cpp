#include "kaczsketch/dense.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace kaczsketch {

void ensure_finite(const RealVector& v, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw std::invalid_argument(std::string(what) + ": non-finite entry");
        }
    }
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols, 0.0) {
    if (rows == 0 || cols == 0) {
        throw std::invalid_argument("DenseMatrix: rows and cols must be >= 1");
    }
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (rows == 0 || cols == 0) {
        throw std::invalid_argument("DenseMatrix: rows and cols must be >= 1");
    }
    if (entries_.size() != rows * cols) {
        throw std::invalid_argument("DenseMatrix: entry count does not match rows*cols");
    }
    validate();
}

void DenseMatrix::validate() const {
    for (double x : entries_) {
        if (!std::isfinite(x)) {
            throw std::invalid_argument("DenseMatrix: non-finite entry");
        }
    }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix I(n, n);
    for (std::size_t i = 0; i < n; ++i) I(i, i) = 1.0;
    return I;
}

DenseMatrix DenseMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty() || rows.front().empty()) {
        throw std::invalid_argument("DenseMatrix::from_rows: empty input");
    }
    const std::size_t n = rows.front().size();
    DenseMatrix A(rows.size(), n);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != n) {
            throw std::invalid_argument("DenseMatrix::from_rows: ragged rows");
        }
        for (std::size_t j = 0; j < n; ++j) A(i, j) = rows[i][j];
    }
    A.validate();
    return A;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm_sq(std::span<const double> a) {
    double s = 0.0;
    for (double x : a) s += x * x;
    return s;
}

RowNormCache row_norms_squared(const DenseMatrix& A) {
    RowNormCache cache;
    cache.normsSq.resize(A.rows());
    for (std::size_t i = 0; i < A.rows(); ++i) {
        const double nsq = norm_sq(A.row(i));
        cache.normsSq[i] = nsq;
        cache.sumSq += nsq;
    }
    return cache;
}

void matvec(const DenseMatrix& A, const RealVector& x, RealVector& out) {
    if (x.size() != A.cols()) {
        throw std::invalid_argument("matvec: x length does not match cols");
    }
    out.resize(A.rows());
    for (std::size_t i = 0; i < A.rows(); ++i) {
        out[i] = dot(A.row(i), x);
    }
}

RealVector matvec(const DenseMatrix& A, const RealVector& x) {
    RealVector out;
    matvec(A, x, out);
    return out;
}

RealVector residual(const DenseMatrix& A, const RealVector& x, const RealVector& b) {
    if (x.size() != A.cols() || b.size() != A.rows()) {
        throw std::invalid_argument("residual: dimension mismatch");
    }
    RealVector r(A.rows());
    for (std::size_t i = 0; i < A.rows(); ++i) {
        r[i] = b[i] - dot(A.row(i), x);
    }
    return r;
}

double frobenius_norm_sq(const DenseMatrix& A) {
    double s = 0.0;
    for (double x : A.entries()) s += x * x;
    return s;
}

double smallest_nonzero_singular_value(const DenseMatrix& A) {
    using RowMajorMat =
        Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<const RowMajorMat> M(A.entries().data(),
                                    static_cast<Eigen::Index>(A.rows()),
                                    static_cast<Eigen::Index>(A.cols()));
    Eigen::BDCSVD<Eigen::MatrixXd> svd(M);
    const auto& sv = svd.singularValues();
    const double sigmaMax = sv.size() > 0 ? sv(0) : 0.0;
    const double tol =
        static_cast<double>(std::max(A.rows(), A.cols())) * sigmaMax * 1e-12;
    double smallest = -1.0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > tol) smallest = sv(i);
    }
    if (smallest < 0.0) {
        throw std::invalid_argument(
            "smallest_nonzero_singular_value: matrix has no nonzero singular value");
    }
    return smallest;
}

}  // namespace kaczsketch
