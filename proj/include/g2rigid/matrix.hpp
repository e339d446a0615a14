#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "g2rigid/error.hpp"
#include "g2rigid/fields.hpp"

namespace g2rigid {

/// Dense row-major matrix over an exact field descriptor F (RationalField or
/// PrimeField). The descriptor travels with the value so that arithmetic
/// never needs global state.
template <class F>
class Matrix {
public:
    using Field = F;
    using Element = typename F::Element;

    Matrix() = default;
    Matrix(F field, std::size_t rows, std::size_t cols)
        : field_(std::move(field)), rows_(rows), cols_(cols), data_(rows * cols, field_.zero()) {}

    static Matrix identity(const F& field, std::size_t n) {
        Matrix m(field, n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = field.one();
        return m;
    }

    static Matrix from_ints(const F& field, std::size_t rows, std::size_t cols, std::initializer_list<long> values) {
        if (values.size() != rows * cols) throw Error(ErrorKind::DimensionMismatch, "initializer size");
        Matrix m(field, rows, cols);
        std::size_t k = 0;
        for (long v : values) m.data_[k++] = field.from_int(v);
        return m;
    }

    static Matrix diagonal(const F& field, std::span<const Element> diag) {
        Matrix m(field, diag.size(), diag.size());
        for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
        return m;
    }

    const F& field() const { return field_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }

    Element& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Element& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<Element> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const Element> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
    const std::vector<Element>& data() const { return data_; }

    bool is_zero() const {
        for (const auto& x : data_)
            if (!field_.is_zero(x)) return false;
        return true;
    }

    bool is_identity() const {
        if (!is_square()) return false;
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                if (!field_.equal((*this)(i, j), i == j ? field_.one() : field_.zero())) return false;
        return true;
    }

    Matrix transpose() const {
        Matrix t(field_, cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
        Matrix b(field_, nr, nc);
        for (std::size_t i = 0; i < nr; ++i)
            for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
        return b;
    }

    void set_block(std::size_t r0, std::size_t c0, const Matrix& b) {
        for (std::size_t i = 0; i < b.rows(); ++i)
            for (std::size_t j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
    }

    Matrix scaled(const Element& c) const {
        Matrix r = *this;
        for (auto& x : r.data_) x = field_.mul(c, x);
        return r;
    }

    /// M - c*I.
    Matrix shifted(const Element& c) const {
        if (!is_square()) throw Error(ErrorKind::NotSquare, "shift of non-square matrix");
        Matrix r = *this;
        for (std::size_t i = 0; i < rows_; ++i) r(i, i) = field_.sub(r(i, i), c);
        return r;
    }

    friend Matrix operator+(const Matrix& a, const Matrix& b) {
        a.check_same_shape(b);
        Matrix r = a;
        for (std::size_t k = 0; k < r.data_.size(); ++k) r.data_[k] = a.field_.add(a.data_[k], b.data_[k]);
        return r;
    }

    friend Matrix operator-(const Matrix& a, const Matrix& b) {
        a.check_same_shape(b);
        Matrix r = a;
        for (std::size_t k = 0; k < r.data_.size(); ++k) r.data_[k] = a.field_.sub(a.data_[k], b.data_[k]);
        return r;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw Error(ErrorKind::DimensionMismatch, "matrix product shape");
        const F& f = a.field_;
        Matrix r(f, a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const Element& aik = a(i, k);
                if (f.is_zero(aik)) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) r(i, j) = f.add(r(i, j), f.mul(aik, b(k, j)));
            }
        }
        return r;
    }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) return false;
        for (std::size_t k = 0; k < a.data_.size(); ++k)
            if (!a.field_.equal(a.data_[k], b.data_[k])) return false;
        return true;
    }

    std::string format() const {
        std::string s = "[";
        for (std::size_t i = 0; i < rows_; ++i) {
            s += i ? ", [" : "[";
            for (std::size_t j = 0; j < cols_; ++j) {
                if (j) s += ", ";
                s += field_.format((*this)(i, j));
            }
            s += "]";
        }
        return s + "]";
    }

private:
    void check_same_shape(const Matrix& b) const {
        if (rows_ != b.rows_ || cols_ != b.cols_) throw Error(ErrorKind::DimensionMismatch, "matrix shape");
    }

    F field_;
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Element> data_;
};

using QMatrix = Matrix<RationalField>;
using FpMatrix = Matrix<PrimeField>;

/// Entrywise reduction of a rational matrix; DenominatorClash if a
/// denominator is divisible by p.
FpMatrix reduce(const QMatrix& m, const PrimeField& field);

}  // namespace g2rigid
