#include "g2rigid/modules.hpp"

#include <random>

namespace g2rigid {

namespace {

using Vec = std::vector<std::uint64_t>;

Vec matvec(const FpMatrix& g, const Vec& v) {
    const PrimeField& f = g.field();
    Vec out(g.rows(), 0);
    for (std::size_t i = 0; i < g.rows(); ++i) {
        std::uint64_t s = 0;
        for (std::size_t j = 0; j < g.cols(); ++j)
            if (v[j]) s = f.add(s, f.mul(g(i, j), v[j]));
        out[i] = s;
    }
    return out;
}

Vec row_of(const FpMatrix& m, std::size_t r) { return Vec(m.row(r).begin(), m.row(r).end()); }

FpMatrix rows_matrix(const PrimeField& f, const std::vector<Vec>& rows, std::size_t cols) {
    FpMatrix m(f, rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t k = 0; k < cols; ++k) m(r, k) = rows[r][k];
    return m;
}

struct SpinTree {
    std::vector<Vec> basis;
    std::vector<std::pair<std::size_t, std::size_t>> tree;
};

SpinTree spin_tree(const Module& m, const Vec& v) {
    SpinTree out;
    RowEchelon ech(m.field, m.dim);
    if (!ech.insert(v)) return out;
    out.basis.push_back(v);
    out.tree.emplace_back(0, 0);
    for (std::size_t i = 0; i < out.basis.size() && out.basis.size() < m.dim; ++i) {
        for (std::size_t s = 0; s < m.gens.size(); ++s) {
            Vec u = matvec(m.gens[s], out.basis[i]);
            if (ech.insert(u)) {
                out.basis.push_back(std::move(u));
                out.tree.emplace_back(i, s);
            }
        }
    }
    return out;
}

std::vector<FpMatrix> transposes(const std::vector<FpMatrix>& gens) {
    std::vector<FpMatrix> out;
    for (const auto& g : gens) out.push_back(g.transpose());
    return out;
}

}  // namespace

std::vector<std::uint64_t> RowEchelon::reduce(std::vector<std::uint64_t> v) const {
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        const auto c = v[pivots_[r]];
        if (c == 0) continue;
        const auto& row = rows_[r];
        for (std::size_t k = pivots_[r]; k < v.size(); ++k)
            if (row[k]) v[k] = f_.sub(v[k], f_.mul(c, row[k]));
    }
    return v;
}

bool RowEchelon::insert(const std::vector<std::uint64_t>& v) {
    if (v.size() != cols_) throw Error(ErrorKind::DimensionMismatch, "row length");
    auto w = reduce(v);
    std::size_t p = 0;
    while (p < w.size() && w[p] == 0) ++p;
    if (p == w.size()) return false;
    const auto inv = f_.inv(w[p]);
    for (auto& x : w) x = f_.mul(x, inv);
    rows_.push_back(std::move(w));
    pivots_.push_back(p);
    return true;
}

FpMatrix RowEchelon::matrix() const {
    FpMatrix m(f_, rows_.size(), cols_);
    for (std::size_t r = 0; r < rows_.size(); ++r)
        for (std::size_t k = 0; k < cols_; ++k) m(r, k) = rows_[r][k];
    return m;
}

FpMatrix adjoint_action(const FpMatrix& g) {
    const PrimeField& f = g.field();
    const std::size_t n = g.rows();
    const FpMatrix gi = inverse(g);
    FpMatrix out(f, n * n, n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                for (std::size_t l = 0; l < n; ++l) out(k * n + l, i * n + j) = f.mul(g(k, i), gi(j, l));
    return out;
}

FpMatrix traceless_basis(const PrimeField& f, std::size_t n) {
    FpMatrix b(f, n * n - 1, n * n);
    std::size_t r = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) b(r++, i * n + j) = f.one();
    for (std::size_t i = 0; i + 1 < n; ++i, ++r) {
        b(r, i * n + i) = f.one();
        b(r, (n - 1) * n + (n - 1)) = f.neg(f.one());
    }
    return b;
}

FpMatrix spin(const Module& m, const FpMatrix& seeds) {
    RowEchelon ech(m.field, m.dim);
    std::vector<Vec> queue;
    for (std::size_t r = 0; r < seeds.rows(); ++r) {
        Vec v = row_of(seeds, r);
        if (ech.insert(v)) queue.push_back(std::move(v));
    }
    for (std::size_t i = 0; i < queue.size() && ech.size() < m.dim; ++i) {
        for (const auto& g : m.gens) {
            Vec u = matvec(g, queue[i]);
            if (ech.insert(u)) queue.push_back(std::move(u));
        }
    }
    return ech.matrix();
}

FpMatrix coordinates(const FpMatrix& b, const FpMatrix& v) {
    const PrimeField& f = b.field();
    const std::size_t s = b.rows();
    const std::size_t d = b.cols();
    FpMatrix aug(f, d, s + v.rows());
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t k = 0; k < d; ++k) aug(k, i) = b(i, k);
    for (std::size_t r = 0; r < v.rows(); ++r)
        for (std::size_t k = 0; k < d; ++k) aug(k, s + r) = v(r, k);
    const auto e = rref(aug);
    for (auto p : e.pivots)
        if (p >= s) throw Error(ErrorKind::DimensionMismatch, "vector outside the span");
    if (e.pivots.size() != s) throw Error(ErrorKind::DimensionMismatch, "basis rows are dependent");
    FpMatrix out(f, v.rows(), s);
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t r = 0; r < v.rows(); ++r) out(r, i) = e.reduced(i, s + r);
    return out;
}

Module submodule(const Module& m, const FpMatrix& sub) {
    std::vector<FpMatrix> gens;
    for (const auto& g : m.gens) gens.push_back(coordinates(sub, sub * g.transpose()).transpose());
    return Module(m.field, sub.rows(), std::move(gens));
}

Module quotient(const Module& m, const FpMatrix& sub) {
    const auto e = rref(sub);
    const std::size_t s = e.rank();
    std::vector<bool> is_pivot(m.dim, false);
    for (auto p : e.pivots) is_pivot[p] = true;
    FpMatrix p(m.field, m.dim, m.dim);  // columns: sub basis, then complement
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t k = 0; k < m.dim; ++k) p(k, i) = e.reduced(i, k);
    std::size_t c = s;
    for (std::size_t k = 0; k < m.dim; ++k)
        if (!is_pivot[k]) p(k, c++) = m.field.one();
    const FpMatrix pi = inverse(p);
    std::vector<FpMatrix> gens;
    for (const auto& g : m.gens) gens.push_back((pi * g * p).block(s, s, m.dim - s, m.dim - s));
    return Module(m.field, m.dim - s, std::move(gens));
}

FpMatrix annihilator(const FpMatrix& dual_sub) { return nullspace(dual_sub); }

FpMatrix AlgebraElement::evaluate(const Module& m) const {
    FpMatrix acc(m.field, m.dim, m.dim);
    for (const auto& [c, word] : terms) {
        FpMatrix w = FpMatrix::identity(m.field, m.dim);
        for (auto s : word) w = w * m.gens.at(s);
        acc = acc + w.scaled(c);
    }
    return acc;
}

std::vector<std::uint64_t> roots_in_prime_field(const Polynomial<PrimeField>& p) {
    const PrimeField& f = p.field();
    if (f.characteristic() >= (1ULL << 20)) throw Error(ErrorKind::TooLarge, "root search limited to p < 2^20");
    std::vector<std::uint64_t> out;
    if (p.is_zero()) return out;
    for (std::uint64_t a = 0; a < f.characteristic(); ++a)
        if (p.evaluate(a) == 0) out.push_back(a);
    return out;
}

namespace {

IrreducibleModule make_certificate(const Module& m, const AlgebraElement& x, std::uint64_t alpha, const Vec& v0) {
    const SpinTree st = spin_tree(m, v0);
    const FpMatrix b = rows_matrix(m.field, st.basis, m.dim);
    std::vector<FpMatrix> structure;
    for (const auto& g : m.gens) structure.push_back(coordinates(b, b * g.transpose()).transpose());
    return IrreducibleModule{m, x, alpha, v0, st.tree, std::move(structure)};
}

}  // namespace

SplitResult meataxe_split(const Module& m, std::uint64_t seed, int attempts) {
    const PrimeField& f = m.field;
    if (m.dim == 0) throw Error(ErrorKind::DegenerateInput, "zero module");
    if (m.dim == 1) {
        AlgebraElement x;  // x = 0, alpha = 0: kernel is everything
        return {FpMatrix(f, 0, 1), make_certificate(m, x, 0, Vec{1})};
    }
    std::mt19937_64 rng(seed);
    const std::size_t k = m.gens.size();
    const std::vector<FpMatrix> dual_gens = transposes(m.gens);
    const Module dual(f, m.dim, dual_gens);
    for (int attempt = 0; attempt < attempts; ++attempt) {
        AlgebraElement x;
        const int nterms = 2 + static_cast<int>(rng() % 3);
        for (int t = 0; t < nterms; ++t) {
            std::vector<std::size_t> word;
            const int len = 1 + static_cast<int>(rng() % 4);
            for (int l = 0; l < len; ++l) word.push_back(rng() % k);
            x.terms.emplace_back(1 + rng() % (f.characteristic() - 1), std::move(word));
        }
        const FpMatrix xm = x.evaluate(m);
        const auto roots = roots_in_prime_field(charpoly(xm));
        for (auto alpha : roots) {
            const FpMatrix shifted = xm.shifted(alpha);
            const FpMatrix null = nullspace(shifted);
            for (std::size_t r = 0; r < null.rows(); ++r) {
                const FpMatrix s = spin(m, null.block(r, 0, 1, m.dim));
                if (s.rows() < m.dim) return {s, std::nullopt};
            }
            if (null.rows() != 1) continue;
            const FpMatrix dnull = nullspace(shifted.transpose());
            const FpMatrix ds = spin(dual, dnull);
            if (ds.rows() < m.dim) return {annihilator(ds), std::nullopt};
            return {FpMatrix(f, 0, m.dim), make_certificate(m, x, alpha, row_of(null, 0))};
        }
    }
    throw Error(ErrorKind::DegenerateInput, "meataxe found neither a submodule nor an irreducibility proof");
}

std::vector<IrreducibleModule> composition_factors(const Module& m, std::uint64_t seed) {
    std::vector<IrreducibleModule> out;
    std::vector<Module> stack{m};
    // depth-first, submodule before quotient
    while (!stack.empty()) {
        Module cur = std::move(stack.back());
        stack.pop_back();
        SplitResult sr = meataxe_split(cur, seed);
        if (sr.certificate) {
            out.push_back(std::move(*sr.certificate));
            continue;
        }
        stack.push_back(quotient(cur, sr.submodule));
        stack.push_back(submodule(cur, sr.submodule));
    }
    return out;
}

std::size_t hom_dim(const IrreducibleModule& s, const Module& m) {
    const PrimeField& f = m.field;
    if (s.module.gens.size() != m.gens.size()) throw Error(ErrorKind::DimensionMismatch, "generator counts differ");
    const std::size_t d = s.module.dim;
    const FpMatrix xm = s.x.evaluate(m);
    const FpMatrix cand = nullspace(xm.shifted(s.alpha));  // phi(v0) lies here
    const std::size_t kdim = cand.rows();
    if (kdim == 0) return 0;
    // images[c][i] = phi_c(b_i) for the c-th candidate
    std::vector<std::vector<Vec>> images(kdim);
    for (std::size_t c = 0; c < kdim; ++c) {
        images[c].push_back(row_of(cand, c));
        for (std::size_t i = 1; i < d; ++i) {
            const auto [par, gen] = s.tree[i];
            images[c].push_back(matvec(m.gens[gen], images[c][par]));
        }
    }
    // g_s phi(b_i) - sum_j structure[s](j, i) phi(b_j) = 0 for all s, i
    const std::size_t eqs = m.gens.size() * d * m.dim;
    FpMatrix system(f, eqs, kdim);
    for (std::size_t c = 0; c < kdim; ++c) {
        std::size_t row = 0;
        for (std::size_t g = 0; g < m.gens.size(); ++g) {
            for (std::size_t i = 0; i < d; ++i) {
                Vec lhs = matvec(m.gens[g], images[c][i]);
                for (std::size_t j = 0; j < d; ++j) {
                    const auto coef = s.structure[g](j, i);
                    if (coef == 0) continue;
                    for (std::size_t k = 0; k < m.dim; ++k)
                        if (images[c][j][k]) lhs[k] = f.sub(lhs[k], f.mul(coef, images[c][j][k]));
                }
                for (std::size_t k = 0; k < m.dim; ++k) system(row++, c) = lhs[k];
            }
        }
    }
    return kdim - rank(system);
}

std::size_t hom_dim_dense(const Module& a, const Module& b) {
    const PrimeField& f = a.field;
    const std::size_t da = a.dim, db = b.dim;
    FpMatrix system(f, a.gens.size() * da * db, da * db);
    std::size_t row = 0;
    for (std::size_t g = 0; g < a.gens.size(); ++g) {
        const FpMatrix& A = a.gens[g];
        const FpMatrix& B = b.gens[g];
        for (std::size_t r = 0; r < db; ++r)
            for (std::size_t c = 0; c < da; ++c, ++row) {
                for (std::size_t k = 0; k < da; ++k) system(row, r * da + k) = f.add(system(row, r * da + k), A(k, c));
                for (std::size_t k = 0; k < db; ++k) system(row, k * da + c) = f.sub(system(row, k * da + c), B(r, k));
            }
    }
    return da * db - rank(system);
}

}  // namespace g2rigid
