#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "g2rigid/tuple.hpp"

namespace g2rigid {

enum class Symmetry { None, Symmetric, Alternating };

std::string to_string(Symmetry s);

/// Multilinear form of order 2 or 3 on F^n, stored as a dense coefficient
/// tensor c[i][j] or c[i][j][k] (row-major).
template <class F>
struct Form {
    using Element = typename F::Element;

    F field;
    std::size_t n = 0;
    unsigned order = 0;
    Symmetry symmetry = Symmetry::None;
    std::vector<Element> data;

    Form(F f, std::size_t dim, unsigned ord, Symmetry sym)
        : field(std::move(f)), n(dim), order(ord), symmetry(sym), data(ipow(dim, ord), field.zero()) {}

    static std::size_t ipow(std::size_t b, unsigned e) {
        std::size_t r = 1;
        while (e--) r *= b;
        return r;
    }

    std::size_t index(std::size_t i, std::size_t j) const { return i * n + j; }
    std::size_t index(std::size_t i, std::size_t j, std::size_t k) const { return (i * n + j) * n + k; }

    Element& at(std::size_t i, std::size_t j) { return data[index(i, j)]; }
    const Element& at(std::size_t i, std::size_t j) const { return data[index(i, j)]; }
    Element& at(std::size_t i, std::size_t j, std::size_t k) { return data[index(i, j, k)]; }
    const Element& at(std::size_t i, std::size_t j, std::size_t k) const { return data[index(i, j, k)]; }

    bool is_zero() const {
        for (const auto& x : data)
            if (!field.is_zero(x)) return false;
        return true;
    }

    /// c(u, v) or c(u, v, w) for coordinate vectors.
    Element evaluate(const std::vector<std::vector<Element>>& args) const {
        if (args.size() != order) throw Error(ErrorKind::DimensionMismatch, "form arity");
        for (const auto& a : args)
            if (a.size() != n) throw Error(ErrorKind::DimensionMismatch, "form argument length");
        Element s = field.zero();
        for (std::size_t idx = 0; idx < data.size(); ++idx) {
            if (field.is_zero(data[idx])) continue;
            Element term = data[idx];
            std::size_t rest = idx;
            for (unsigned slot = order; slot-- > 0;) {
                term = field.mul(term, args[slot][rest % n]);
                rest /= n;
            }
            s = field.add(s, term);
        }
        return s;
    }

    /// Gram matrix of an order-2 form.
    Matrix<F> matrix() const {
        if (order != 2) throw Error(ErrorKind::DimensionMismatch, "matrix() needs an order-2 form");
        Matrix<F> m(field, n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) m(i, j) = at(i, j);
        return m;
    }

    friend bool operator==(const Form& a, const Form& b) {
        if (a.n != b.n || a.order != b.order) return false;
        for (std::size_t k = 0; k < a.data.size(); ++k)
            if (!a.field.equal(a.data[k], b.data[k])) return false;
        return true;
    }
};

using QForm = Form<RationalField>;
using FpForm = Form<PrimeField>;

/// Pullback x -> c(Mx, My, ...): c'(i, j, ..) = sum c(a, b, ..) M_ai M_bj ..
template <class F>
Form<F> pullback(const Form<F>& c, const Matrix<F>& m) {
    if (m.rows() != c.n || m.cols() != c.n) throw Error(ErrorKind::DimensionMismatch, "pullback matrix size");
    const F& f = c.field;
    const std::size_t n = c.n;
    Form<F> cur = c;
    // Contract one slot at a time; slot s has stride n^(order-1-s).
    for (unsigned slot = 0; slot < c.order; ++slot) {
        std::size_t stride = 1;
        for (unsigned t = slot + 1; t < c.order; ++t) stride *= n;
        Form<F> next(f, n, c.order, c.symmetry);
        for (std::size_t idx = 0; idx < cur.data.size(); ++idx) {
            const auto& v = cur.data[idx];
            if (f.is_zero(v)) continue;
            const std::size_t a = (idx / stride) % n;
            const std::size_t base = idx - a * stride;
            for (std::size_t i = 0; i < n; ++i) {
                if (f.is_zero(m(a, i))) continue;
                auto& dst = next.data[base + i * stride];
                dst = f.add(dst, f.mul(v, m(a, i)));
            }
        }
        cur = std::move(next);
    }
    return cur;
}

/// Dickson trilinear form in the basis (x0, x1, x2, x3, x1', x2', x3'),
/// alternating: each monomial x_a x_b x_c of x0x1x1' + x0x2x2' + x0x3x3' +
/// x1x2x3 + x1'x2'x3' contributes sign(sigma) at every permutation of (a, b, c).
/// With Symmetry::Symmetric each permutation gets 1/6 instead, so the
/// associated cubic polynomial is the displayed one.
template <class F>
Form<F> dickson_form(const F& f, Symmetry sym = Symmetry::Alternating) {
    if (sym == Symmetry::None) throw Error(ErrorKind::InvalidScalar, "dickson_form is symmetric or alternating");
    Form<F> c(f, 7, 3, sym);
    const std::size_t mono[5][3] = {{0, 1, 4}, {0, 2, 5}, {0, 3, 6}, {1, 2, 3}, {4, 5, 6}};
    const std::size_t perm[6][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {1, 0, 2}, {0, 2, 1}, {2, 1, 0}};
    const auto sixth = f.div(f.one(), f.from_int(6));
    for (const auto& m : mono) {
        for (int p = 0; p < 6; ++p) {
            const auto sign = p < 3 ? f.one() : f.neg(f.one());
            c.at(m[perm[p][0]], m[perm[p][1]], m[perm[p][2]]) = sym == Symmetry::Alternating ? sign : sixth;
        }
    }
    return c;
}

/// -2 x0^2 + x1x1' + x2x2' + x3x3' as the Gram matrix with b(e0,e0) = -2 and
/// b(e_i, e_i') = b(e_i', e_i) = 1.
template <class F>
Form<F> g2_bilinear(const F& f) {
    Form<F> b(f, 7, 2, Symmetry::Symmetric);
    b.at(0, 0) = f.from_int(-2);
    for (std::size_t i = 1; i <= 3; ++i) {
        b.at(i, i + 3) = f.one();
        b.at(i + 3, i) = f.one();
    }
    return b;
}

template <class F>
bool stabilizes(const Matrix<F>& m, const std::vector<Form<F>>& forms) {
    for (const auto& c : forms)
        if (!(pullback(c, m) == c)) return false;
    return true;
}

/// Elementary tensors spanning the forms of the given order and symmetry.
template <class F>
std::vector<Form<F>> form_basis(const F& f, std::size_t n, unsigned order, Symmetry sym) {
    std::vector<Form<F>> out;
    if (order == 2) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (sym != Symmetry::None && j < i) continue;
                if (sym == Symmetry::Alternating && i == j) continue;
                Form<F> e(f, n, 2, sym);
                e.at(i, j) = f.one();
                if (sym == Symmetry::Symmetric) e.at(j, i) = f.one();
                if (sym == Symmetry::Alternating) e.at(j, i) = f.neg(f.one());
                out.push_back(std::move(e));
            }
        return out;
    }
    if (order != 3) throw Error(ErrorKind::DimensionMismatch, "forms of order 2 or 3 only");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) {
                Form<F> e(f, n, 3, sym);
                if (sym == Symmetry::None) {
                    e.at(i, j, k) = f.one();
                } else if (sym == Symmetry::Symmetric) {
                    if (!(i <= j && j <= k)) continue;
                    const std::size_t v[3] = {i, j, k};
                    const std::size_t perm[6][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {1, 0, 2}, {0, 2, 1}, {2, 1, 0}};
                    for (const auto& p : perm) e.at(v[p[0]], v[p[1]], v[p[2]]) = f.one();
                } else {
                    if (!(i < j && j < k)) continue;
                    const std::size_t v[3] = {i, j, k};
                    const std::size_t perm[6][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {1, 0, 2}, {0, 2, 1}, {2, 1, 0}};
                    for (int p = 0; p < 6; ++p)
                        e.at(v[perm[p][0]], v[perm[p][1]], v[perm[p][2]]) = p < 3 ? f.one() : f.neg(f.one());
                }
                out.push_back(std::move(e));
            }
    return out;
}

template <class F>
struct FormSpace {
    std::size_t dimension = 0;
    std::size_t ambient = 0;  // dimension of the space searched
    std::vector<Form<F>> basis;
};

/// Forms of the given order and symmetry invariant under every matrix of the
/// tuple (infinity included), as the nullspace of sum_p x_p (A^* E_p - E_p).
/// Default symmetry: symmetric for order 2, alternating for order 3.
template <class F>
FormSpace<F> invariant_form_space(const std::vector<Matrix<F>>& mats, unsigned order, Symmetry sym) {
    if (mats.empty()) throw Error(ErrorKind::DimensionMismatch, "no matrices");
    const F& f = mats.front().field();
    const std::size_t n = mats.front().rows();
    const auto basis = form_basis(f, n, order, sym);
    const std::size_t len = basis.empty() ? 0 : basis.front().data.size();
    Matrix<F> system(f, mats.size() * len, basis.size());
    for (std::size_t p = 0; p < basis.size(); ++p) {
        for (std::size_t a = 0; a < mats.size(); ++a) {
            const Form<F> moved = pullback(basis[p], mats[a]);
            for (std::size_t k = 0; k < len; ++k) system(a * len + k, p) = f.sub(moved.data[k], basis[p].data[k]);
        }
    }
    FormSpace<F> out;
    out.ambient = basis.size();
    const Matrix<F> null = nullspace(system);
    out.dimension = null.rows();
    for (std::size_t r = 0; r < null.rows(); ++r) {
        Form<F> c(f, n, order, sym);
        for (std::size_t p = 0; p < basis.size(); ++p) {
            if (f.is_zero(null(r, p))) continue;
            for (std::size_t k = 0; k < len; ++k)
                c.data[k] = f.add(c.data[k], f.mul(null(r, p), basis[p].data[k]));
        }
        out.basis.push_back(std::move(c));
    }
    return out;
}

template <class F>
FormSpace<F> invariant_form_space(const RigidTuple<F>& t, unsigned order) {
    return invariant_form_space(t.all(), order, order == 2 ? Symmetry::Symmetric : Symmetry::Alternating);
}

/// Dimension of the Lie algebra {X : sum over slots of c(.., X e, ..) = 0}
/// preserving every given form; 49 unknowns for n = 7.
template <class F>
std::size_t lie_stabilizer_dim(const std::vector<Form<F>>& forms) {
    if (forms.empty()) throw Error(ErrorKind::DimensionMismatch, "no forms");
    const F& f = forms.front().field;
    const std::size_t n = forms.front().n;
    std::size_t eqs = 0;
    for (const auto& c : forms) {
        if (c.n != n) throw Error(ErrorKind::DimensionMismatch, "forms on different spaces");
        eqs += c.data.size();
    }
    // Unknown X_{d,a} at column d*n + a; X e_a = sum_d X_{d,a} e_d.
    Matrix<F> system(f, eqs, n * n);
    std::size_t row0 = 0;
    for (const auto& c : forms) {
        for (std::size_t idx = 0; idx < c.data.size(); ++idx) {
            std::size_t stride = 1;
            for (unsigned slot = c.order; slot-- > 0;) {
                const std::size_t a = (idx / stride) % n;
                const std::size_t base = idx - a * stride;
                for (std::size_t d = 0; d < n; ++d) {
                    const auto& v = c.data[base + d * stride];
                    if (f.is_zero(v)) continue;
                    auto& cell = system(row0 + idx, d * n + a);
                    cell = f.add(cell, v);
                }
                stride *= n;
            }
        }
        row0 += c.data.size();
    }
    return n * n - rank(system);
}

/// Dimension of the associative algebra generated by the matrices: closure of
/// span{I} under left multiplication by generators, kept in echelon form.
template <class F>
std::size_t enveloping_dim(const std::vector<Matrix<F>>& gens) {
    if (gens.empty()) throw Error(ErrorKind::DimensionMismatch, "no generators");
    const F& f = gens.front().field();
    const std::size_t n = gens.front().rows();
    const std::size_t len = n * n;

    std::vector<std::vector<typename F::Element>> echelon;  // reduced rows
    std::vector<std::size_t> pivot;
    auto insert = [&](const Matrix<F>& m) {
        std::vector<typename F::Element> v(m.data().begin(), m.data().end());
        for (std::size_t r = 0; r < echelon.size(); ++r) {
            const auto coef = v[pivot[r]];
            if (f.is_zero(coef)) continue;
            for (std::size_t k = 0; k < len; ++k)
                if (!f.is_zero(echelon[r][k])) v[k] = f.sub(v[k], f.mul(coef, echelon[r][k]));
        }
        std::size_t p = 0;
        while (p < len && f.is_zero(v[p])) ++p;
        if (p == len) return false;
        const auto inv = f.inv(v[p]);
        for (auto& x : v) x = f.mul(x, inv);
        for (auto& row : echelon) {
            const auto coef = row[p];
            if (f.is_zero(coef)) continue;
            for (std::size_t k = 0; k < len; ++k) row[k] = f.sub(row[k], f.mul(coef, v[k]));
        }
        echelon.push_back(std::move(v));
        pivot.push_back(p);
        return true;
    };

    std::vector<Matrix<F>> frontier{Matrix<F>::identity(f, n)};
    insert(frontier.front());
    while (!frontier.empty() && echelon.size() < len) {
        std::vector<Matrix<F>> next;
        for (const auto& w : frontier)
            for (const auto& g : gens) {
                Matrix<F> prod = g * w;
                if (insert(prod)) next.push_back(std::move(prod));
            }
        frontier = std::move(next);
    }
    return echelon.size();
}

/// Reduction of a rational tuple modulo an odd prime, with the Jordan data
/// at the rational eigenvalues recomputed over F_ell.
struct Reduction {
    FpTuple tuple;
    bool product_relation = false;
    LocalDatum<RationalField> profile_q;
    LocalDatum<PrimeField> profile_mod;
    bool profile_preserved = false;
    std::vector<std::string> mismatches;
};

Reduction reduce_mod(const QTuple& t, std::uint64_t ell);

enum class Verdict { Generates, Inconclusive, Fails };

std::string to_string(Verdict v);

struct GenerationReport {
    std::uint64_t ell = 0;
    std::string profile;
    bool ell_gt_5 = false;
    bool profile_ok = false;
    bool product_relation = false;
    std::size_t enveloping_dim = 0;
    std::size_t form_dim2 = 0;
    std::size_t form_dim3 = 0;
    Verdict verdict = Verdict::Fails;
    std::vector<std::string> reasons;
};

/// Certificate that a rank-7 tuple over F_ell satisfies the hypotheses under
/// which the Feit-Fong-Thompson classification forces generation of G2(F_ell).
GenerationReport generation_certificate(const FpTuple& t);

/// Scalars z in F_p^* with z I stabilizing the form.
std::vector<std::uint64_t> scalar_stabilizers(const FpForm& c);

}  // namespace g2rigid
