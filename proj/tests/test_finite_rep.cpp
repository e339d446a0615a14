#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "g2rigid/g2_forms.hpp"
#include "g2rigid/rep_analysis.hpp"

using namespace g2rigid;

namespace {

const FiniteMatrixGroup& h56() {
    static const FiniteMatrixGroup g = build_h56(29);
    return g;
}

// Classes by brute force: x ~ y iff y = g x g^{-1} for some element g.
std::multiset<std::size_t> class_sizes_oracle(const FiniteMatrixGroup& g) {
    std::vector<bool> seen(g.order(), false);
    std::multiset<std::size_t> sizes;
    for (std::size_t x = 0; x < g.order(); ++x) {
        if (seen[x]) continue;
        std::set<std::size_t> cls;
        for (std::size_t k = 0; k < g.order(); ++k)
            cls.insert(g.index_of(g.element(k) * g.element(x) * inverse(g.element(k))));
        for (auto y : cls) seen[y] = true;
        sizes.insert(cls.size());
    }
    return sizes;
}

// dim H^1 from the full cocycle system: unknowns f(g) for every element,
// one block of equations f(gh) = f(g) + g f(h) for every pair.
std::size_t h1_dense(const FiniteMatrixGroup& g, const std::vector<FpMatrix>& images) {
    const PrimeField& f = g.field();
    const std::size_t n = g.order();
    const std::size_t d = images.front().rows();
    FpMatrix sys(f, n * n * d, n * d);
    std::size_t row = 0;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            const std::size_t ab = g.product_index(a, b);
            for (std::size_t r = 0; r < d; ++r, ++row) {
                sys(row, ab * d + r) = f.add(sys(row, ab * d + r), f.one());
                sys(row, a * d + r) = f.sub(sys(row, a * d + r), f.one());
                for (std::size_t c = 0; c < d; ++c) sys(row, b * d + c) = f.sub(sys(row, b * d + c), images[a](r, c));
            }
        }
    const std::size_t z1 = n * d - rank(sys);
    FpMatrix fixed(f, 0, d);
    for (const auto& m : images) fixed = vstack(fixed, m.shifted(f.one()));
    const std::size_t b1 = rank(fixed);
    return z1 - b1;
}

std::vector<FpMatrix> images_of(const FiniteMatrixGroup& g, const Module& m) {
    // element i = element(parent) * generator(via)
    std::vector<FpMatrix> out{FpMatrix::identity(m.field, m.dim)};
    for (std::size_t i = 1; i < g.order(); ++i) out.push_back(out[g.parent(i)] * m.gens[g.via(i)]);
    return out;
}

FpMatrix perm_matrix(const PrimeField& f, const std::vector<std::size_t>& p) {
    FpMatrix m(f, p.size(), p.size());
    for (std::size_t i = 0; i < p.size(); ++i) m(p[i], i) = f.one();
    return m;
}

FpMatrix block_diag(const FpMatrix& a, const FpMatrix& b) {
    FpMatrix m(a.field(), a.rows() + b.rows(), a.cols() + b.cols());
    m.set_block(0, 0, a);
    m.set_block(a.rows(), a.cols(), b);
    return m;
}

}  // namespace

TEST_CASE("build_h56") {
    const auto& g = h56();
    CHECK(g.order() == 56);
    std::set<std::size_t> orders;
    for (std::size_t i = 0; i < g.order(); ++i) orders.insert(g.element_order(i));
    CHECK(orders == std::set<std::size_t>{1, 2, 7});
    CHECK(enveloping_dim(g.generators()) == 49);

    try {
        build_h56(11);
        FAIL("expected BadResidue");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::BadResidue);
    }
    for (std::uint64_t bad : {2ULL, 7ULL}) {
        try {
            build_h56(bad);
            FAIL("expected BadCharacteristic");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::BadCharacteristic);
        }
    }
    CHECK(build_h56(43).order() == 56);
}

TEST_CASE("conjugacy_classes") {
    const auto cd = conjugacy_classes(h56());
    std::multiset<std::size_t> sizes;
    std::size_t total = 0;
    for (const auto& c : cd.classes) {
        sizes.insert(c.members.size());
        total += c.members.size();
    }
    CHECK(cd.classes.size() == 8);
    CHECK(sizes == std::multiset<std::size_t>{1, 7, 8, 8, 8, 8, 8, 8});
    CHECK(sizes == class_sizes_oracle(h56()));
    CHECK(total == 56);

    const PrimeField f(29);
    CHECK(conjugacy_classes(FiniteMatrixGroup({FpMatrix::identity(f, 3)})).classes.size() == 1);
    // 16 has order 7 in F_29^*
    const FiniteMatrixGroup c7({FpMatrix::identity(f, 2).scaled(16)});
    CHECK(c7.order() == 7);
    CHECK(conjugacy_classes(c7).classes.size() == 7);

    try {
        FiniteMatrixGroup big(sym_power_rep(17, 1), 1000);
        FAIL("expected TooLarge");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::TooLarge);
    }
}

TEST_CASE("adjoint decomposition of H56") {
    const DecompositionReport d = adjoint_decomposition(h56());
    CHECK(d.method == "ordinary");
    CHECK(d.multiset() == std::map<std::size_t, std::size_t>{{1, 7}, {7, 6}});
    std::size_t total = 0;
    for (const auto& c : d.constituents) total += c.dimension * c.multiplicity;
    CHECK(total == 49);
    // seven different one-dimensional constituents
    std::set<std::vector<std::uint64_t>> linear;
    for (const auto& c : d.constituents)
        if (c.dimension == 1) {
            CHECK(c.multiplicity == 1);
            linear.insert(c.character);
        }
    CHECK(linear.size() == 7);
}

TEST_CASE("linear constituents are the characters of H/F_8") {
    const auto& g = h56();
    const auto cd = conjugacy_classes(g);
    const DecompositionReport d = adjoint_decomposition(g);
    const FpMatrix& rot = g.generators()[1];
    const PrimeField& f = g.field();
    std::set<std::uint64_t> at_rotation;
    for (const auto& c : d.constituents) {
        if (c.dimension != 1) continue;
        // trivial on the translations
        for (const auto& cls : cd.classes)
            if (cls.element_order == 2) CHECK(c.character[&cls - cd.classes.data()] == 1);
        // a homomorphism on the rotation subgroup
        const auto z = c.character[cd.class_of[g.index_of(rot)]];
        FpMatrix rk = FpMatrix::identity(f, 7);
        for (unsigned k = 0; k < 7; ++k) {
            CHECK(c.character[cd.class_of[g.index_of(rk)]] == f.pow(z, k));
            rk = rk * rot;
        }
        at_rotation.insert(z);
    }
    CHECK(at_rotation.size() == 7);
    for (auto z : at_rotation) CHECK(f.pow(z, 7) == 1);
}

TEST_CASE("regular representation: sum of squared degrees is the order") {
    const auto& g = h56();
    const PrimeField& f = g.field();
    std::vector<FpMatrix> images;
    for (std::size_t a = 0; a < g.order(); ++a) {
        std::vector<std::size_t> perm(g.order());
        for (std::size_t b = 0; b < g.order(); ++b) perm[b] = g.product_index(a, b);
        images.push_back(perm_matrix(f, perm));
    }
    const DecompositionReport d = decompose_ordinary(g, conjugacy_classes(g), images);
    std::size_t sum_sq = 0;
    for (const auto& c : d.constituents) {
        sum_sq += c.dimension * c.dimension;
        CHECK(c.multiplicity == c.dimension);
    }
    CHECK(sum_sq == 56);
    CHECK(d.constituents.size() == 8);
}

TEST_CASE("trivial group decomposition") {
    const PrimeField f(29);
    const FiniteMatrixGroup triv({FpMatrix::identity(f, 1)});
    CHECK(adjoint_decomposition(triv).multiset() == std::map<std::size_t, std::size_t>{{1, 1}});
}

TEST_CASE("sym_power_rep") {
    const auto gens = sym_power_rep(17, 6);
    CHECK(gens[0].rows() == 7);
    const auto triv = sym_power_rep(17, 0);
    CHECK(triv[0].rows() == 1);
    CHECK(triv[0].is_identity());
    try {
        sym_power_rep(13, 6);
        FAIL("expected TooSmallPrime");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::TooSmallPrime);
    }
    // homomorphism property on random 2x2 matrices
    const PrimeField f(17);
    std::mt19937 rng(3);
    for (int t = 0; t < 5; ++t) {
        FpMatrix a(f, 2, 2), b(f, 2, 2);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) {
                a(i, j) = rng() % 17;
                b(i, j) = rng() % 17;
            }
        CHECK(sym_power(a * b, 6) == sym_power(a, 6) * sym_power(b, 6));
    }
}

TEST_CASE("SL2(F_17) on ad(Sym^6): modular decomposition") {
    const FiniteMatrixGroup g(sym_power_rep(17, 6));
    CHECK(g.order() == 2448);  // -1 acts trivially on even symmetric powers
    CHECK_THROWS_AS(adjoint_decomposition_ordinary(g), Error);
    const DecompositionReport d = adjoint_decomposition(g);
    CHECK(d.method == "modular");
    CHECK(d.semisimple);
    CHECK(d.multiset() == std::map<std::size_t, std::size_t>{{1, 1}, {3, 1}, {5, 1}, {7, 1}, {9, 1}, {11, 1}, {13, 1}});
}

TEST_CASE("meataxe factors and Hom against dense oracles") {
    const PrimeField f(7);
    const auto s1 = sym_power_rep(7, 1), s2 = sym_power_rep(7, 2);
    const Module sum({block_diag(s2[0], s1[0]), block_diag(s2[1], s1[1])});
    const auto factors = composition_factors(sum);
    std::multiset<std::size_t> dims;
    for (const auto& fac : factors) dims.insert(fac.module.dim);
    CHECK(dims == std::multiset<std::size_t>{2, 3});
    for (const auto& fac : factors) {
        CHECK(hom_dim(fac, sum) == hom_dim_dense(fac.module, sum));
        CHECK(hom_dim(fac, fac.module) == 1);
    }
    const DecompositionReport d = decompose_modular(sum);
    CHECK(d.semisimple);

    // a non-split extension: the unipotent 2-dim module of Z/3 over F_3
    const PrimeField f3(3);
    const Module uni({FpMatrix::from_ints(f3, 2, 2, {1, 1, 0, 1})});
    const DecompositionReport du = decompose_modular(uni);
    CHECK(du.multiset() == std::map<std::size_t, std::size_t>{{1, 2}});
    CHECK_FALSE(du.semisimple);

    // SL2(F_17): the 3-dim factor of ad(Sym^6) against the whole module
    const Module ad = adjoint_module(sym_power_rep(17, 6));
    for (const auto& fac : composition_factors(ad))
        if (fac.module.dim == 3) CHECK(hom_dim(fac, ad) == hom_dim_dense(fac.module, ad));
}

TEST_CASE("H^1 against the dense full-group cocycle system") {
    // S3 permuting coordinates, over F_5 (ordinary) and F_3 (modular)
    for (std::uint64_t p : {5ULL, 3ULL}) {
        const PrimeField f(p);
        const FiniteMatrixGroup s3({perm_matrix(f, {1, 0, 2}), perm_matrix(f, {1, 2, 0})});
        REQUIRE(s3.order() == 6);
        const Module ad0 = adjoint0_module(s3.generators());
        CAPTURE(p);
        CHECK(h1_dim(s3, ad0) == h1_dense(s3, images_of(s3, ad0)));
        const Module nat(s3.generators());
        CHECK(h1_dim(s3, nat) == h1_dense(s3, images_of(s3, nat)));
    }
    // Z/3 on the trivial module over F_3: H^1 = Hom(Z/3, F_3)
    const PrimeField f3(3);
    const FiniteMatrixGroup z3({FpMatrix::from_ints(f3, 2, 2, {1, 1, 0, 1})});
    const Module trivial(f3, 1, {FpMatrix::identity(f3, 1)});
    CHECK(h1_dim(z3, trivial) == 1);
    CHECK(h1_dense(z3, images_of(z3, trivial)) == 1);
    const Module ad0 = adjoint0_module(z3.generators());
    CHECK(h1_dim(z3, ad0) == h1_dense(z3, images_of(z3, ad0)));
}

TEST_CASE("bigness_check: H56 at 29") {
    const BignessReport b = bigness_check(h56());
    CHECK(b.h0_ad0 == 0);
    CHECK(b.h0_ad0_all_elements == b.h0_ad0);
    CHECK(b.h1_ad0 == 0);
    CHECK(b.adjoint.multiset() == std::map<std::size_t, std::size_t>{{1, 7}, {7, 6}});
    // condition (viii) has no witness on the six nontrivial linear characters
    CHECK(b.idempotent_span == 43);
    CHECK(b.viii_obstruction_dim == 6);
    CHECK_FALSE(b.condition_viii);
    CHECK_FALSE(b.big);
    std::size_t missing = 0;
    for (const auto& w : b.witnesses) {
        const auto& c = b.adjoint.constituents[w.constituent];
        if (!w.found) {
            ++missing;
            CHECK(c.dimension == 1);
        }
    }
    CHECK(missing == 6);
}

TEST_CASE("condition (viii) on H56 by explicit projections") {
    // X_k = diag(z^{k i}) spans a linear constituent; for every h and every
    // simple eigenvalue alpha, pi_{h,alpha} X_k i_{h,alpha} is computed from
    // V = V_alpha + im (h - alpha)^7.
    const auto& g = h56();
    const PrimeField& f = g.field();
    const FpMatrix& rot = g.generators()[1];
    const std::uint64_t z = 16;  // order 7 mod 29
    for (unsigned k = 0; k < 7; ++k) {
        FpMatrix x(f, 7, 7);
        for (std::size_t i = 0; i < 7; ++i) x(i, i) = f.pow(z, k * i);
        // semi-invariance: translations fix X, the rotation scales it
        const FpMatrix conj = rot * x * inverse(rot);
        bool proportional = false;
        for (std::uint64_t c = 1; c < 29 && !proportional; ++c) proportional = conj == x.scaled(c);
        REQUIRE(proportional);
        CHECK(g.generators()[0] * x * g.generators()[0] == x);

        bool witness = false;
        for (const auto& h : g.elements()) {
            for (std::uint64_t alpha = 1; alpha < 29; ++alpha) {
                const FpMatrix s = h.shifted(alpha);
                const FpMatrix gen_kernel = nullspace(power(s, 7));
                if (gen_kernel.rows() != 1) continue;
                const FpMatrix image = row_basis(power(s, 7).transpose());  // column space, as rows
                FpMatrix basis = vstack(gen_kernel, image).transpose();     // columns: v, then image
                const FpMatrix pi = inverse(basis).block(0, 0, 1, 7);       // first coordinate
                const FpMatrix v = gen_kernel.transpose();
                if (!(pi * x * v).is_zero()) witness = true;
            }
        }
        CAPTURE(k);
        CHECK(witness == (k == 0));
    }
}

TEST_CASE("bigness_check: trivial group and scalars") {
    const PrimeField f(29);
    const BignessReport triv = bigness_check(FiniteMatrixGroup({FpMatrix::identity(f, 7)}));
    CHECK(triv.h0_ad0 == 48);
    CHECK_FALSE(triv.big);
    const BignessReport pm = bigness_check(FiniteMatrixGroup({FpMatrix::identity(f, 7).scaled(28)}));
    CHECK_FALSE(pm.condition_viii);
    CHECK(pm.idempotent_span == 0);
    CHECK_FALSE(pm.big);
}

TEST_CASE("bigness_check: SL2(F_17) on Sym^6") {
    const BignessReport b = bigness_check(FiniteMatrixGroup(sym_power_rep(17, 6)));
    CHECK(b.h0_ad0 == 0);
    CHECK(b.h0_ad0_all_elements == 0);
    CHECK(b.h1_ad0 == 0);
    CHECK(b.idempotent_span == 49);
    CHECK(b.condition_viii);
    CHECK(b.big);
}

TEST_CASE("largest_submodule_in") {
    const Module ad = adjoint_module(h56().generators());
    const PrimeField& f = ad.field;
    CHECK(largest_submodule_in(ad, FpMatrix::identity(f, 49)).rows() == 49);
    // the scalars form a submodule; a single off-diagonal unit does not
    FpMatrix scal(f, 1, 49);
    for (std::size_t i = 0; i < 7; ++i) scal(0, i * 7 + i) = 1;
    CHECK(largest_submodule_in(ad, scal).rows() == 1);
    FpMatrix e01(f, 1, 49);
    e01(0, 1) = 1;
    CHECK(largest_submodule_in(ad, e01).rows() == 0);
}
