#ifndef NDP_LINALG_HPP
#define NDP_LINALG_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace ndp {

/// Dense row-major matrix of doubles. Value semantics; no aliasing tricks.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) {
        return data_[i * cols_ + j];
    }
    double operator()(std::size_t i, std::size_t j) const {
        return data_[i * cols_ + j];
    }

    std::span<double> row(std::size_t i) {
        return {data_.data() + i * cols_, cols_};
    }
    std::span<const double> row(std::size_t i) const {
        return {data_.data() + i * cols_, cols_};
    }

    const std::vector<double>& entries() const { return data_; }

    bool all_finite() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Pivots with magnitude below this are treated as zero during elimination.
inline constexpr double kSingularPivotThreshold = 1e-12;

/// Inverse of a square matrix by Gauss-Jordan elimination with partial
/// pivoting. Throws SingularMatrix (carrying the failing column) when a
/// pivot falls below kSingularPivotThreshold.
Matrix gauss_jordan_invert(const Matrix& m);

/// Least-squares coefficient matrix B = (XᵀX + ridge·I)⁻¹ XᵀY for the row
/// convention Y ≈ X·B. X and Y are N×n with matching shapes, N ≥ 1.
/// With ridge = 0 this is the plain normal-equations solution; the ridge
/// term exists because clusters with fewer rows than columns make XᵀX
/// singular.
Matrix normal_equations_solve(const Matrix& X, const Matrix& Y, double ridge);

std::vector<double> matvec(const Matrix& m, std::span<const double> v);
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& m);

} // namespace ndp

#endif
