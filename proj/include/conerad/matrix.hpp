#pragma once

#include <cstddef>
#include <vector>

#include "conerad/cone.hpp"

namespace conerad {

/// Dense row-major real matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    /// Builds from nested rows; throws DimensionError on ragged input and
    /// NonFiniteError on NaN/Inf entries.
    static Matrix from_rows(const std::vector<std::vector<double>>& rows);
    static Matrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

    std::vector<double> apply(std::span<const double> x) const;
    ConeVector apply(const ConeVector& x) const { return ConeVector(apply(x.entries())); }

    bool nonnegative() const noexcept;
    std::vector<std::vector<double>> to_rows() const;

    friend Matrix operator*(const Matrix& a, const Matrix& b);
    friend Matrix operator+(const Matrix& a, const Matrix& b);
    friend Matrix operator*(double alpha, const Matrix& a);
    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Solves a x = b by Gaussian elimination with partial pivoting. Throws
/// DimensionError on shape mismatch, DegenerateBoundError when a pivot vanishes.
std::vector<double> solve(Matrix a, std::vector<double> b);

} // namespace conerad
