#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <type_traits>
#include <vector>

#include "g2rigid/matrix.hpp"
#include "g2rigid/polynomial.hpp"

namespace g2rigid {

/// Weakly decreasing list of positive block sizes.
class Partition {
public:
    Partition() = default;
    explicit Partition(std::vector<int> parts);

    const std::vector<int>& parts() const { return parts_; }
    int total() const;
    bool empty() const { return parts_.empty(); }
    /// Conjugate (transposed Young diagram).
    Partition conjugate() const;
    std::string format() const;

    friend bool operator==(const Partition&, const Partition&) = default;
    friend auto operator<=>(const Partition&, const Partition&) = default;

private:
    std::vector<int> parts_;
};

template <class F>
struct Echelon {
    Matrix<F> reduced;                 // reduced row echelon form, zero rows at the bottom
    std::vector<std::size_t> pivots;   // pivot column of row i, for i < rank
    std::size_t rank() const { return pivots.size(); }
};

Echelon<RationalField> rref_fraction_free(const QMatrix& m);

/// Distinct rational roots, ascending (rational root test). TooLarge when
/// the extreme coefficients cannot be factored by trial division.
std::vector<mpq_class> rational_roots(const Polynomial<RationalField>& p);

template <class F>
Echelon<F> rref(const Matrix<F>& m) {
    if constexpr (std::is_same_v<F, RationalField>) {
        return rref_fraction_free(m);
    } else {
        const F& f = m.field();
        Matrix<F> a = m;
        std::vector<std::size_t> pivots;
        std::size_t r = 0;
        for (std::size_t c = 0; c < a.cols() && r < a.rows(); ++c) {
            std::size_t p = r;
            while (p < a.rows() && f.is_zero(a(p, c))) ++p;
            if (p == a.rows()) continue;
            if (p != r)
                for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a(p, j), a(r, j));
            const auto inv = f.inv(a(r, c));
            for (std::size_t j = c; j < a.cols(); ++j) a(r, j) = f.mul(a(r, j), inv);
            for (std::size_t i = 0; i < a.rows(); ++i) {
                if (i == r || f.is_zero(a(i, c))) continue;
                const auto factor = a(i, c);
                for (std::size_t j = c; j < a.cols(); ++j) a(i, j) = f.sub(a(i, j), f.mul(factor, a(r, j)));
            }
            pivots.push_back(c);
            ++r;
        }
        return {std::move(a), std::move(pivots)};
    }
}

template <class F>
std::size_t rank(const Matrix<F>& m) {
    return rref(m).rank();
}

/// Basis of {v : M v = 0}, one vector per row of the result.
template <class F>
Matrix<F> nullspace(const Matrix<F>& m) {
    const F& f = m.field();
    const auto ech = rref(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto c : ech.pivots) is_pivot[c] = true;
    Matrix<F> basis(f, m.cols() - ech.rank(), m.cols());
    std::size_t k = 0;
    for (std::size_t free = 0; free < m.cols(); ++free) {
        if (is_pivot[free]) continue;
        basis(k, free) = f.one();
        for (std::size_t i = 0; i < ech.rank(); ++i) basis(k, ech.pivots[i]) = f.neg(ech.reduced(i, free));
        ++k;
    }
    return basis;
}

/// Basis (as rows) of the row space of M, in reduced echelon form.
template <class F>
Matrix<F> row_basis(const Matrix<F>& m) {
    const auto ech = rref(m);
    return ech.reduced.block(0, 0, ech.rank(), m.cols());
}

/// Stack the rows of a and b.
template <class F>
Matrix<F> vstack(const Matrix<F>& a, const Matrix<F>& b) {
    if (a.rows() == 0) return b;
    if (b.rows() == 0) return a;
    if (a.cols() != b.cols()) throw Error(ErrorKind::DimensionMismatch, "vstack");
    Matrix<F> r(a.field(), a.rows() + b.rows(), a.cols());
    r.set_block(0, 0, a);
    r.set_block(a.rows(), 0, b);
    return r;
}

template <class F>
Matrix<F> inverse(const Matrix<F>& m) {
    if (!m.is_square()) throw Error(ErrorKind::NotSquare, "inverse of non-square matrix");
    const std::size_t n = m.rows();
    Matrix<F> aug(m.field(), n, 2 * n);
    aug.set_block(0, 0, m);
    aug.set_block(0, n, Matrix<F>::identity(m.field(), n));
    const auto ech = rref(aug);
    if (ech.rank() < n || ech.pivots[n - 1] != n - 1) throw Error(ErrorKind::InvalidScalar, "matrix is singular");
    return ech.reduced.block(0, n, n, n);
}

template <class F>
Matrix<F> power(const Matrix<F>& m, unsigned e) {
    Matrix<F> result = Matrix<F>::identity(m.field(), m.rows());
    Matrix<F> base = m;
    while (e != 0) {
        if (e & 1U) result = result * base;
        base = base * base;
        e >>= 1U;
    }
    return result;
}

/// Characteristic polynomial det(T*I - M) by Berkowitz's division-free
/// recurrence.
template <class F>
Polynomial<F> charpoly(const Matrix<F>& m) {
    if (!m.is_square()) throw Error(ErrorKind::NotSquare, "charpoly of non-square matrix");
    const F& f = m.field();
    const std::size_t n = m.rows();
    using E = typename F::Element;
    // coefficients high degree first
    std::vector<E> vect{f.one()};
    for (std::size_t r = 0; r < n; ++r) {
        // Toeplitz column t = (1, -a_rr, -R C, -R A C, ..., -R A^{r-1} C)
        std::vector<E> t{f.one(), f.neg(m(r, r))};
        std::vector<E> col(r);
        for (std::size_t i = 0; i < r; ++i) col[i] = m(i, r);
        for (std::size_t k = 0; k < r; ++k) {
            E dot = f.zero();
            for (std::size_t j = 0; j < r; ++j) dot = f.add(dot, f.mul(m(r, j), col[j]));
            t.push_back(f.neg(dot));
            std::vector<E> next(r, f.zero());
            for (std::size_t i = 0; i < r; ++i)
                for (std::size_t j = 0; j < r; ++j) next[i] = f.add(next[i], f.mul(m(i, j), col[j]));
            col = std::move(next);
        }
        std::vector<E> out(r + 2, f.zero());
        for (std::size_t i = 0; i < r + 2; ++i)
            for (std::size_t j = 0; j <= i && j < vect.size(); ++j) out[i] = f.add(out[i], f.mul(t[i - j], vect[j]));
        vect = std::move(out);
    }
    std::reverse(vect.begin(), vect.end());
    return Polynomial<F>(f, std::move(vect));
}

/// Jordan block sizes of M at eigenvalue mu, from the rank sequence of
/// (M - mu I)^j. Throws NotAnEigenvalue when charpoly(mu) != 0.
template <class F>
Partition jordan_partition(const Matrix<F>& m, const typename F::Element& mu) {
    if (!m.is_square()) throw Error(ErrorKind::NotSquare, "jordan_partition of non-square matrix");
    const F& f = m.field();
    if (!f.is_zero(charpoly(m).evaluate(mu)))
        throw Error(ErrorKind::NotAnEigenvalue, f.format(mu) + " is not an eigenvalue");
    const Matrix<F> x = m.shifted(mu);
    std::vector<long> ranks{static_cast<long>(m.rows())};
    Matrix<F> p = x;
    while (true) {
        ranks.push_back(static_cast<long>(rank(p)));
        if (ranks.back() == ranks[ranks.size() - 2]) break;
        p = p * x;
    }
    std::vector<int> parts;
    for (std::size_t j = 1; j + 1 < ranks.size(); ++j) {
        const long blocks = ranks[j - 1] - 2 * ranks[j] + ranks[j + 1];
        for (long b = 0; b < blocks; ++b) parts.push_back(static_cast<int>(j));
    }
    std::sort(parts.rbegin(), parts.rend());
    return Partition(std::move(parts));
}

/// Eigenvalue-tagged Jordan data, skipping values that are not eigenvalues.
template <class F>
std::vector<std::pair<typename F::Element, Partition>> jordan_profile(
    const Matrix<F>& m, const std::vector<typename F::Element>& candidates) {
    std::vector<std::pair<typename F::Element, Partition>> out;
    const auto cp = charpoly(m);
    for (const auto& mu : candidates) {
        if (!m.field().is_zero(cp.evaluate(mu))) continue;
        out.emplace_back(mu, jordan_partition(m, mu));
    }
    return out;
}

}  // namespace g2rigid
