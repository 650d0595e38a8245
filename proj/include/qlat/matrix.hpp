#pragma once

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <vector>

#include "qlat/arith.hpp"

namespace qlat {

/// Dense row-major matrix over an exact ring.
template <class T>
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}
    Matrix(std::initializer_list<std::initializer_list<long>> init) {
        rows_ = init.size();
        cols_ = rows_ ? init.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto& row : init) {
            if (row.size() != cols_) fail(ErrorKind::InvalidInput, "ragged matrix literal");
            for (long v : row) data_.push_back(T(v));
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::vector<T> row(std::size_t i) const {
        return std::vector<T>(data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_);
    }
    void set_row(std::size_t i, const std::vector<T>& v) {
        for (std::size_t j = 0; j < cols_; ++j) (*this)(i, j) = v[j];
    }
    void swap_rows(std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
    }
    void swap_cols(std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
    }
    /// row[dst] += factor * row[src]
    void add_row(std::size_t dst, std::size_t src, const T& factor) {
        for (std::size_t j = 0; j < cols_; ++j) (*this)(dst, j) += factor * (*this)(src, j);
    }
    void add_col(std::size_t dst, std::size_t src, const T& factor) {
        for (std::size_t i = 0; i < rows_; ++i) (*this)(i, dst) += factor * (*this)(i, src);
    }

    Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) fail(ErrorKind::InvalidInput, "matrix shape mismatch");
        Matrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const T& aik = a(i, k);
                if (aik == 0) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using IntMatrix = Matrix<Integer>;
using RatMatrix = Matrix<Rational>;
using IntVector = std::vector<Integer>;
using RatVector = std::vector<Rational>;

RatMatrix to_rational(const IntMatrix& m);
/// Requires every entry to be integral.
IntMatrix to_integer(const RatMatrix& m);

RatVector mat_vec(const RatMatrix& a, const RatVector& v);
Rational dot(const RatVector& a, const RatVector& b);
/// x^T A y
Rational bilinear(const RatMatrix& a, const RatVector& x, const RatVector& y);
Rational bilinear(const IntMatrix& a, const RatVector& x, const RatVector& y);

Integer determinant(const IntMatrix& a);
std::size_t rank(const RatMatrix& a);
std::optional<RatMatrix> inverse(const RatMatrix& a);
/// Solution of A x = b for square invertible A.
RatVector solve(const RatMatrix& a, const RatVector& b);

/// U * A * V = D with U, V unimodular and D diagonal (d_1 | d_2 | ..., nonnegative).
struct SmithForm {
    IntMatrix U, D, V;
    std::vector<Integer> diagonal() const;
};
SmithForm smith_form(const IntMatrix& a);
std::vector<Integer> elementary_divisors(const IntMatrix& a);

/// U * A = H, H in row echelon form with positive pivots and reduced entries above pivots.
struct HermiteForm {
    IntMatrix H, U;
    std::size_t rank = 0;
};
HermiteForm hermite_form(const IntMatrix& a);

/// Integral basis (as rows) of {x in Z^n : A x = 0}, in Hermite form.
IntMatrix kernel_basis(const IntMatrix& a);
/// Some integer x with A x = b, or nullopt.
std::optional<IntVector> solve_integer(const IntMatrix& a, const IntVector& b);
/// Basis (rows) of the saturation (Q-span intersected with Z^n) of the row span.
IntMatrix saturation(const IntMatrix& rows);

std::ostream& operator<<(std::ostream& os, const IntMatrix& m);

} // namespace qlat
