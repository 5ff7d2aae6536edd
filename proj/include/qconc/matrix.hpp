#pragma once
// Copyright (c) 2026 the qconc authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qconc/errors.hpp"

namespace qconc {

using Complex = std::complex<double>;

namespace tolerance {
/// Default tolerance for equality-style comparisons.
inline constexpr double kEquality = 1e-9;
/// Default tolerance for factorization residuals.
inline constexpr double kResidual = 1e-10;
} // namespace tolerance

/// Dense row-major complex matrix with value semantics. Dimensions are
/// positive and entries are finite; both are checked on construction from
/// raw data. All operations return fresh values, so instances can be shared
/// freely across threads.
class ComplexMatrix {
public:
    ComplexMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
        require_positive(rows, cols);
        entries_.assign(rows * cols, Complex{});
    }

    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
        : rows_(rows), cols_(cols), entries_(std::move(entries)) {
        require_positive(rows, cols);
        if (entries_.size() != rows_ * cols_)
            throw InvalidInputError("matrix entries length must equal rows*cols");
        if (!all_finite())
            throw InvalidInputError("matrix entries must be finite");
    }

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    /// Square matrix with the given real values on the diagonal.
    static ComplexMatrix diagonal(std::span<const double> values) {
        ComplexMatrix m(values.size(), values.size());
        for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
        return m;
    }

    /// rows x cols matrix with values[i] at (i, i); embeds a rectangular
    /// diagonal factor, extra positions are zero.
    static ComplexMatrix rect_diagonal(std::size_t rows, std::size_t cols,
                                       std::span<const double> values) {
        if (values.size() > std::min(rows, cols))
            throw InvalidInputError("rect_diagonal: more values than diagonal slots");
        ComplexMatrix m(rows, cols);
        for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }

    Complex& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const {
        return entries_[i * cols_ + j];
    }

    std::span<const Complex> entries() const { return entries_; }

    bool all_finite() const {
        for (const Complex& z : entries_)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        return true;
    }

    ComplexMatrix& operator+=(const ComplexMatrix& o) {
        require_same_shape(o, "+");
        for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += o.entries_[i];
        return *this;
    }
    ComplexMatrix& operator-=(const ComplexMatrix& o) {
        require_same_shape(o, "-");
        for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= o.entries_[i];
        return *this;
    }
    ComplexMatrix& operator*=(Complex z) {
        for (Complex& e : entries_) e *= z;
        return *this;
    }

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, Complex z) { return a *= z; }
    friend ComplexMatrix operator*(Complex z, ComplexMatrix a) { return a *= z; }
    friend ComplexMatrix operator*(ComplexMatrix a, double x) { return a *= Complex(x); }
    friend ComplexMatrix operator*(double x, ComplexMatrix a) { return a *= Complex(x); }

    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
        if (a.cols_ != b.rows_)
            throw InvalidInputError("matrix product: inner dimensions differ ("
                                    + std::to_string(a.cols_) + " vs " + std::to_string(b.rows_)
                                    + ")");
        ComplexMatrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const Complex aik = a(i, k);
                if (aik == Complex{}) continue;
                const Complex* brow = &b.entries_[k * b.cols_];
                Complex* crow = &c.entries_[i * c.cols_];
                for (std::size_t j = 0; j < b.cols_; ++j) crow[j] += aik * brow[j];
            }
        }
        return c;
    }

    ComplexMatrix transpose() const {
        ComplexMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    ComplexMatrix conjugate() const {
        ComplexMatrix c(rows_, cols_);
        for (std::size_t i = 0; i < entries_.size(); ++i) c.entries_[i] = std::conj(entries_[i]);
        return c;
    }

    ComplexMatrix adjoint() const {
        ComplexMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = std::conj((*this)(i, j));
        return t;
    }

    Complex trace() const {
        if (!is_square()) throw InvalidInputError("trace: matrix must be square");
        Complex t{};
        for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
        return t;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (const Complex& z : entries_) s += std::norm(z);
        return std::sqrt(s);
    }

    double max_abs() const {
        double m = 0.0;
        for (const Complex& z : entries_) m = std::max(m, std::abs(z));
        return m;
    }

    ComplexMatrix column(std::size_t j) const {
        ComplexMatrix c(rows_, 1);
        for (std::size_t i = 0; i < rows_; ++i) c(i, 0) = (*this)(i, j);
        return c;
    }

private:
    static void require_positive(std::size_t rows, std::size_t cols) {
        if (rows == 0 || cols == 0)
            throw InvalidInputError("matrix dimensions must be positive");
    }
    void require_same_shape(const ComplexMatrix& o, const char* op) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw InvalidInputError(std::string("matrix ") + op + ": shape mismatch");
    }

    std::size_t rows_;
    std::size_t cols_;
    std::vector<Complex> entries_;
};

/// Kronecker product; composite row index is i_a * rows(b) + i_b.
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix k(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t ia = 0; ia < a.rows(); ++ia)
        for (std::size_t ja = 0; ja < a.cols(); ++ja) {
            const Complex az = a(ia, ja);
            if (az == Complex{}) continue;
            for (std::size_t ib = 0; ib < b.rows(); ++ib)
                for (std::size_t jb = 0; jb < b.cols(); ++jb)
                    k(ia * b.rows() + ib, ja * b.cols() + jb) = az * b(ib, jb);
        }
    return k;
}

inline double frobenius_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw InvalidInputError("frobenius_distance: shape mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) s += std::norm(a(i, j) - b(i, j));
    return std::sqrt(s);
}

/// Entrywise comparison with absolute tolerance on |a_ij - b_ij|.
inline bool approx_equal(const ComplexMatrix& a, const ComplexMatrix& b,
                         double tol = tolerance::kEquality) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (std::abs(a(i, j) - b(i, j)) > tol) return false;
    return true;
}

/// Frobenius norm of M - M†.
inline double hermiticity_defect(const ComplexMatrix& m) {
    if (!m.is_square()) throw InvalidInputError("hermiticity_defect: matrix must be square");
    double s = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            s += std::norm(m(i, j) - std::conj(m(j, i)));
    return std::sqrt(s);
}

/// Frobenius norm of U†U - I; zero exactly when the columns are orthonormal.
inline double unitarity_defect(const ComplexMatrix& u) {
    double s = 0.0;
    for (std::size_t p = 0; p < u.cols(); ++p)
        for (std::size_t q = 0; q < u.cols(); ++q) {
            Complex dot{};
            for (std::size_t r = 0; r < u.rows(); ++r) dot += std::conj(u(r, p)) * u(r, q);
            if (p == q) dot -= 1.0;
            s += std::norm(dot);
        }
    return std::sqrt(s);
}

inline bool is_unitary(const ComplexMatrix& u, double tol = tolerance::kEquality) {
    return u.is_square() && unitarity_defect(u) <= tol;
}

/// Frobenius inner product tr(A†B).
inline Complex frobenius_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw InvalidInputError("frobenius_inner: shape mismatch");
    Complex s{};
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) s += std::conj(a(i, j)) * b(i, j);
    return s;
}

} // namespace qconc
