#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "g2rigid/linalg.hpp"

namespace g2rigid {

/// Matrices (A_1, ..., A_r) at the finite singular points; A_inf is derived
/// as (A_1 ... A_r)^{-1} so the product relation holds by construction.
template <class F>
class RigidTuple {
public:
    using Element = typename F::Element;

    explicit RigidTuple(std::vector<Matrix<F>> finite) : finite_(std::move(finite)) {
        if (finite_.empty()) throw Error(ErrorKind::DimensionMismatch, "tuple needs at least one finite point");
        const std::size_t n = finite_.front().rows();
        Matrix<F> prod = Matrix<F>::identity(finite_.front().field(), n);
        for (const auto& a : finite_) {
            if (!a.is_square() || a.rows() != n) throw Error(ErrorKind::DimensionMismatch, "tuple matrices must be n x n");
            prod = prod * a;
        }
        infinity_ = inverse(prod);
    }

    const F& field() const { return finite_.front().field(); }
    std::size_t rank() const { return finite_.front().rows(); }
    std::size_t finite_points() const { return finite_.size(); }
    const std::vector<Matrix<F>>& finite() const { return finite_; }
    const Matrix<F>& infinity() const { return *infinity_; }

    /// A_1, ..., A_r, A_inf.
    std::vector<Matrix<F>> all() const {
        auto v = finite_;
        v.push_back(*infinity_);
        return v;
    }

    bool product_relation_holds() const {
        Matrix<F> prod = Matrix<F>::identity(field(), rank());
        for (const auto& a : finite_) prod = prod * a;
        return (prod * *infinity_).is_identity();
    }

private:
    std::vector<Matrix<F>> finite_;
    std::optional<Matrix<F>> infinity_;
};

using QTuple = RigidTuple<RationalField>;
using FpTuple = RigidTuple<PrimeField>;

/// Eigenvalue/partition pairs for one singular point, eigenvalues ascending.
template <class F>
using PointDatum = std::vector<std::pair<typename F::Element, Partition>>;

/// Local data at every point including infinity.
template <class F>
using LocalDatum = std::vector<PointDatum<F>>;

/// Jordan data of every matrix restricted to the given candidate eigenvalues.
template <class F>
LocalDatum<F> local_datum(const RigidTuple<F>& t, const std::vector<typename F::Element>& candidates) {
    LocalDatum<F> out;
    for (const auto& m : t.all()) out.push_back(jordan_profile(m, candidates));
    return out;
}

template <class F>
std::string format_datum(const F& field, const LocalDatum<F>& d) {
    std::string s;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (i) s += " | ";
        for (std::size_t j = 0; j < d[i].size(); ++j) {
            if (j) s += " ";
            s += field.format(d[i][j].first) + ":" + d[i][j].second.format();
        }
    }
    return s;
}

/// Dimension of {X : XM = MX}, via the nullspace of the commutator operator.
template <class F>
std::size_t centralizer_dim(const Matrix<F>& m) {
    if (!m.is_square()) throw Error(ErrorKind::NotSquare, "centralizer of non-square matrix");
    const std::size_t n = m.rows();
    const F& f = m.field();
    Matrix<F> op(f, n * n, n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t row = i * n + j;
            for (std::size_t k = 0; k < n; ++k) {
                op(row, i * n + k) = f.add(op(row, i * n + k), m(k, j));
                op(row, k * n + j) = f.sub(op(row, k * n + j), m(i, k));
            }
        }
    }
    return n * n - rank(op);
}

/// (2 - k) n^2 + sum of centralizer dimensions over all k points, infinity
/// included.
template <class F>
long rigidity_index(const RigidTuple<F>& t) {
    const auto mats = t.all();
    const long n = static_cast<long>(t.rank());
    long index = (2 - static_cast<long>(mats.size())) * n * n;
    for (const auto& m : mats) index += static_cast<long>(centralizer_dim(m));
    return index;
}

template <class F>
RigidTuple<F> scalar_twist(const RigidTuple<F>& t, const std::vector<typename F::Element>& scalars) {
    if (scalars.size() != t.finite_points()) throw Error(ErrorKind::DimensionMismatch, "one scalar per finite point");
    std::vector<Matrix<F>> out;
    for (std::size_t i = 0; i < scalars.size(); ++i) {
        if (t.field().is_zero(scalars[i])) throw Error(ErrorKind::InvalidScalar, "twist scalar must be nonzero");
        out.push_back(t.finite()[i].scaled(scalars[i]));
    }
    return RigidTuple<F>(std::move(out));
}

/// Middle convolution MC_lambda. The tuple acts on V^r through the block
/// matrices B_k (identity outside block row k, whose entries are
/// A_1 - 1, ..., A_{k-1} - 1, lambda A_k, lambda (A_{k+1} - 1), ..., lambda (A_r - 1));
/// the result is the induced action on V^r / (K + L) with
/// K = sum_k ker(A_k - 1) placed in block k and L = intersection of ker(B_k - 1).
template <class F>
RigidTuple<F> middle_convolution(const RigidTuple<F>& t, const typename F::Element& lambda) {
    const F& f = t.field();
    if (f.is_zero(lambda) || f.equal(lambda, f.one())) throw Error(ErrorKind::InvalidLambda, "lambda must differ from 0 and 1");
    bool all_identity = true;
    for (const auto& a : t.finite()) all_identity = all_identity && a.is_identity();
    if (all_identity) throw Error(ErrorKind::DegenerateInput, "every local monodromy is trivial");

    const std::size_t n = t.rank();
    const std::size_t r = t.finite_points();
    const std::size_t big = n * r;
    const Matrix<F> id = Matrix<F>::identity(f, n);

    std::vector<Matrix<F>> blocks;
    for (std::size_t k = 0; k < r; ++k) {
        Matrix<F> b = Matrix<F>::identity(f, big);
        for (std::size_t j = 0; j < r; ++j) {
            Matrix<F> entry = j < k    ? t.finite()[j] - id
                              : j == k ? t.finite()[j].scaled(lambda)
                                       : (t.finite()[j] - id).scaled(lambda);
            b.set_block(k * n, j * n, entry);
        }
        blocks.push_back(std::move(b));
    }

    // Spanning rows of K + L.
    Matrix<F> span(f, 0, big);
    for (std::size_t k = 0; k < r; ++k) {
        const Matrix<F> ker = nullspace(t.finite()[k] - id);
        Matrix<F> lifted(f, ker.rows(), big);
        lifted.set_block(0, k * n, ker);
        span = vstack(span, lifted);
    }
    Matrix<F> stacked(f, 0, big);
    const Matrix<F> big_id = Matrix<F>::identity(f, big);
    for (const auto& b : blocks) stacked = vstack(stacked, b - big_id);
    span = vstack(span, nullspace(stacked));
    const Matrix<F> sub = span.rows() ? row_basis(span) : span;
    const std::size_t d = sub.rows();
    if (d == big) throw Error(ErrorKind::DegenerateInput, "middle convolution has rank 0");

    // Complete by standard basis vectors, greedily in index order.
    Matrix<F> basis = sub;
    std::vector<std::size_t> complement;
    for (std::size_t i = 0; i < big && basis.rows() < big; ++i) {
        Matrix<F> e(f, 1, big);
        e(0, i) = f.one();
        Matrix<F> trial = vstack(basis, e);
        if (rank(trial) > basis.rows()) {
            basis = std::move(trial);
            complement.push_back(i);
        }
    }
    const Matrix<F> p = basis.transpose();  // columns are basis vectors
    const Matrix<F> p_inv = inverse(p);
    std::vector<Matrix<F>> out;
    for (std::size_t k = 0; k < r; ++k) {
        const Matrix<F> c = p_inv * blocks[k] * p;
        out.push_back(c.block(d, d, big - d, big - d));
    }
    return RigidTuple<F>(std::move(out));
}

}  // namespace g2rigid
