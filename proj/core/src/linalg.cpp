#include "ndp/linalg.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "ndp/errors.hpp"

namespace ndp {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_)
        throw DimensionMismatch("Matrix: entry count does not match shape");
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m(i, i) = 1.0;
    return m;
}

bool Matrix::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v))
            return false;
    return true;
}

Matrix gauss_jordan_invert(const Matrix& m) {
    const std::size_t n = m.rows();
    if (n == 0 || n != m.cols())
        throw DimensionMismatch("gauss_jordan_invert: matrix must be square");

    // Augmented system [A | I], reduced in place to [I | A⁻¹].
    Matrix aug(n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            aug(i, j) = m(i, j);
        aug(i, n + i) = 1.0;
    }

    for (std::size_t col = 0; col < n; ++col) {
        // Partial pivoting: bring the largest remaining entry of this
        // column onto the diagonal.
        std::size_t pivot_row = col;
        double best = std::fabs(aug(col, col));
        for (std::size_t r = col + 1; r < n; ++r) {
            const double v = std::fabs(aug(r, col));
            if (v > best) {
                best = v;
                pivot_row = r;
            }
        }
        if (best < kSingularPivotThreshold)
            throw SingularMatrix("gauss_jordan_invert: singular at column " +
                                     std::to_string(col),
                                 col);
        if (pivot_row != col)
            for (std::size_t j = 0; j < 2 * n; ++j)
                std::swap(aug(col, j), aug(pivot_row, j));

        const double inv_pivot = 1.0 / aug(col, col);
        for (std::size_t j = 0; j < 2 * n; ++j)
            aug(col, j) *= inv_pivot;
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col)
                continue;
            const double factor = aug(r, col);
            if (factor == 0.0)
                continue;
            for (std::size_t j = 0; j < 2 * n; ++j)
                aug(r, j) -= factor * aug(col, j);
        }
    }

    Matrix inverse(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            inverse(i, j) = aug(i, n + j);
    return inverse;
}

Matrix normal_equations_solve(const Matrix& X, const Matrix& Y, double ridge) {
    if (X.rows() == 0)
        throw DimensionMismatch("normal_equations_solve: X has no rows");
    if (X.rows() != Y.rows() || X.cols() != Y.cols())
        throw DimensionMismatch(
            "normal_equations_solve: X and Y shapes differ");
    if (ridge < 0.0)
        throw ValidationError("normal_equations_solve: ridge must be >= 0");

    const Matrix Xt = transpose(X);
    Matrix gram = matmul(Xt, X);
    for (std::size_t i = 0; i < gram.rows(); ++i)
        gram(i, i) += ridge;
    return matmul(gauss_jordan_invert(gram), matmul(Xt, Y));
}

std::vector<double> matvec(const Matrix& m, std::span<const double> v) {
    if (m.cols() != v.size())
        throw DimensionMismatch("matvec: dimension mismatch");
    std::vector<double> out(m.rows(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j)
            acc += m(i, j) * v[j];
        out[i] = acc;
    }
    return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows())
        throw DimensionMismatch("matmul: dimension mismatch");
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0)
                continue;
            for (std::size_t j = 0; j < b.cols(); ++j)
                out(i, j) += aik * b(k, j);
        }
    return out;
}

Matrix transpose(const Matrix& m) {
    Matrix out(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            out(j, i) = m(i, j);
    return out;
}

} // namespace ndp
