#include "g2rigid/finite_group.hpp"

#include <algorithm>
#include <numeric>

#include "g2rigid/linalg.hpp"

namespace g2rigid {

std::size_t FiniteMatrixGroup::KeyHash::operator()(const std::vector<std::uint64_t>& v) const {
    std::uint64_t h = 1469598103934665603ULL;
    for (auto x : v) {
        h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
}

FiniteMatrixGroup::FiniteMatrixGroup(std::vector<FpMatrix> generators, std::size_t bound)
    : field_(generators.empty() ? throw Error(ErrorKind::DimensionMismatch, "group needs a generator")
                                : generators.front().field()),
      dim_(generators.front().rows()),
      gens_(std::move(generators)) {
    for (const auto& g : gens_)
        if (!g.is_square() || g.rows() != dim_) throw Error(ErrorKind::DimensionMismatch, "generators must be n x n");
    const std::size_t k = gens_.size();
    elements_.push_back(FpMatrix::identity(field_, dim_));
    index_.emplace(elements_.back().data(), 0);
    parent_.push_back(0);
    via_.push_back(0);
    for (std::size_t i = 0; i < elements_.size(); ++i) {
        for (std::size_t s = 0; s < k; ++s) {
            FpMatrix m = elements_[i] * gens_[s];
            auto it = index_.find(m.data());
            std::size_t idx;
            if (it == index_.end()) {
                idx = elements_.size();
                if (idx >= bound)
                    throw Error(ErrorKind::TooLarge, "group order exceeds the bound " + std::to_string(bound));
                index_.emplace(m.data(), idx);
                elements_.push_back(std::move(m));
                parent_.push_back(i);
                via_.push_back(s);
            } else {
                idx = it->second;
            }
            right_.push_back(idx);
        }
    }
    inverse_.resize(elements_.size());
    for (std::size_t i = 0; i < elements_.size(); ++i) inverse_[i] = index_of(inverse(elements_[i]));
}

std::size_t FiniteMatrixGroup::index_of(const FpMatrix& m) const {
    auto it = index_.find(m.data());
    if (it == index_.end() || m.rows() != dim_) throw Error(ErrorKind::DimensionMismatch, "matrix is not a group element");
    return it->second;
}

bool FiniteMatrixGroup::contains(const FpMatrix& m) const {
    return m.rows() == dim_ && m.cols() == dim_ && index_.count(m.data()) > 0;
}

std::size_t FiniteMatrixGroup::product_index(std::size_t i, std::size_t j) const {
    return index_of(elements_[i] * elements_[j]);
}

std::size_t FiniteMatrixGroup::element_order(std::size_t i) const {
    std::size_t o = 1;
    FpMatrix p = elements_[i];
    while (!p.is_identity()) {
        p = p * elements_[i];
        ++o;
    }
    return o;
}

ClassData conjugacy_classes(const FiniteMatrixGroup& g) {
    const std::size_t n = g.order();
    ClassData out;
    constexpr std::size_t unset = static_cast<std::size_t>(-1);
    out.class_of.assign(n, unset);
    std::vector<FpMatrix> gens_inv;
    for (const auto& s : g.generators()) gens_inv.push_back(inverse(s));
    for (std::size_t x = 0; x < n; ++x) {
        if (out.class_of[x] != unset) continue;
        const std::size_t c = out.classes.size();
        ConjugacyClass cls;
        cls.representative = x;
        std::vector<std::size_t> queue{x};
        out.class_of[x] = c;
        for (std::size_t q = 0; q < queue.size(); ++q) {
            for (std::size_t s = 0; s < gens_inv.size(); ++s) {
                const std::size_t y = g.index_of(gens_inv[s] * g.element(queue[q]) * g.generators()[s]);
                if (out.class_of[y] == unset) {
                    out.class_of[y] = c;
                    queue.push_back(y);
                }
            }
        }
        std::sort(queue.begin(), queue.end());
        cls.members = std::move(queue);
        cls.element_order = g.element_order(x);
        out.classes.push_back(std::move(cls));
    }
    for (auto& cls : out.classes) cls.inverse_class = out.class_of[g.inverse_index(cls.representative)];
    return out;
}

namespace {

// F_8 = F_2[T]/(T^3 + T + 1), elements as 3-bit masks.
unsigned f8_mul(unsigned a, unsigned b) {
    unsigned r = 0;
    for (int i = 0; i < 3; ++i)
        if (b >> i & 1) r ^= a << i;
    for (int i = 4; i >= 3; --i)
        if (r >> i & 1) r ^= 0b1011u << (i - 3);
    return r;
}

unsigned f8_trace(unsigned a) {
    const unsigned a2 = f8_mul(a, a);
    const unsigned a4 = f8_mul(a2, a2);
    return (a ^ a2 ^ a4) & 1u;  // the trace lies in F_2 = {0, 1}
}

}  // namespace

FiniteMatrixGroup build_h56(std::uint64_t ell) {
    if (std::gcd(ell, std::uint64_t{56}) != 1)
        throw Error(ErrorKind::BadCharacteristic, std::to_string(ell) + " divides the group order 56");
    if (ell % 7 != 1) throw Error(ErrorKind::BadResidue, std::to_string(ell) + " is not 1 mod 7");
    const PrimeField f(ell);

    std::vector<unsigned> basis;  // a_i = T^i
    unsigned a = 1;
    for (int i = 0; i < 7; ++i) {
        basis.push_back(a);
        a = f8_mul(a, 0b010u);
    }
    FpMatrix translate(f, 7, 7), rotate(f, 7, 7);
    for (std::size_t i = 0; i < 7; ++i) {
        translate(i, i) = f8_trace(basis[i]) ? f.from_int(-1) : f.one();
        rotate((i + 6) % 7, i) = f.one();
    }
    FiniteMatrixGroup g({translate, rotate});
    if (g.order() != 56) throw Error(ErrorKind::DegenerateInput, "H56 closure has order " + std::to_string(g.order()));
    return g;
}

FpMatrix sym_power(const FpMatrix& g, unsigned m) {
    const PrimeField& f = g.field();
    if (g.rows() != 2 || g.cols() != 2) throw Error(ErrorKind::DimensionMismatch, "sym_power needs a 2x2 matrix");
    // column i: (a + c y)^{m-i} (b + d y)^i expanded in powers of y
    FpMatrix out(f, m + 1, m + 1);
    for (unsigned i = 0; i <= m; ++i) {
        std::vector<std::uint64_t> poly{f.one()};
        auto times = [&](std::uint64_t c0, std::uint64_t c1) {
            std::vector<std::uint64_t> next(poly.size() + 1, f.zero());
            for (std::size_t j = 0; j < poly.size(); ++j) {
                next[j] = f.add(next[j], f.mul(poly[j], c0));
                next[j + 1] = f.add(next[j + 1], f.mul(poly[j], c1));
            }
            poly = std::move(next);
        };
        for (unsigned k = 0; k < m - i; ++k) times(g(0, 0), g(1, 0));
        for (unsigned k = 0; k < i; ++k) times(g(0, 1), g(1, 1));
        for (unsigned j = 0; j <= m; ++j) out(j, i) = poly[j];
    }
    return out;
}

std::vector<FpMatrix> sym_power_rep(std::uint64_t ell, unsigned m) {
    if (ell <= 2ULL * m + 1)
        throw Error(ErrorKind::TooSmallPrime, "need ell > 2m + 1 = " + std::to_string(2 * m + 1));
    const PrimeField f(ell);
    const FpMatrix u = FpMatrix::from_ints(f, 2, 2, {1, 1, 0, 1});
    const FpMatrix w = FpMatrix::from_ints(f, 2, 2, {0, -1, 1, 0});
    return {sym_power(u, m), sym_power(w, m)};
}

}  // namespace g2rigid
