#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <random>

#include "g2rigid/frobenius.hpp"

using namespace g2rigid;

namespace {

// f_s written out from the family: prod_{i=1..6} (X_{i+1} - X_i) * X1 X3 X5 X7
// * (X1 - 1)(X2 - 1)(X4 - 1)(X6 - 1), X7 = s; the cyclic reading adds X1 - X7.
template <class T>
T family(const std::array<T, 7>& x, bool cyclic) {
    T f = 1;
    for (int i = 0; i < 6; ++i) f *= x[i + 1] - x[i];
    f *= x[0] * x[2] * x[4] * x[6];
    f *= (x[0] - 1) * (x[1] - 1) * (x[3] - 1) * (x[5] - 1);
    if (cyclic) f *= x[0] - x[6];
    return f;
}

long euler(long u, long p) {
    u %= p;
    if (u < 0) u += p;
    if (u == 0) return 0;
    long r = 1, b = u, e = (p - 1) / 2;
    for (; e > 0; e >>= 1, b = b * b % p)
        if (e & 1) r = r * b % p;
    return r == 1 ? 1 : -1;
}

// Plain-integer enumeration over F_p: (N_nonzero, T_chi).
std::pair<long, long> oracle_prime(long p, long s, bool cyclic) {
    long n = 0, t = 0;
    std::array<long, 7> x{};
    x[6] = s;
    long total = 1;
    for (int i = 0; i < 6; ++i) total *= p;
    for (long idx = 0; idx < total; ++idx) {
        long r = idx;
        for (int i = 0; i < 6; ++i) {
            x[static_cast<std::size_t>(i)] = r % p;
            r /= p;
        }
        long f = 1;
        std::array<long, 7> y = x;
        for (auto& v : y) v %= p;
        const long full = family<long>(y, cyclic) % p;
        f = (full + p) % p;
        n += f != 0;
        t += euler(f, p);
    }
    return {n, t};
}

// #{(x, y) in F_p^6 x F_p : y^2 = f(x) != 0}
long oracle_double_cover(long p, long s) {
    std::map<long, long> roots;
    for (long y = 0; y < p; ++y) ++roots[y * y % p];
    long count = 0;
    std::array<long, 7> x{};
    x[6] = s;
    long total = 1;
    for (int i = 0; i < 6; ++i) total *= p;
    for (long idx = 0; idx < total; ++idx) {
        long r = idx;
        for (int i = 0; i < 6; ++i) {
            x[static_cast<std::size_t>(i)] = r % p;
            r /= p;
        }
        const long f = ((family<long>(x, false) % p) + p) % p;
        if (f != 0) count += roots[f];
    }
    return count;
}

class MemoryCache : public SeriesCache {
public:
    std::optional<SeriesTerm> load(const SeriesKey& key) override {
        ++loads;
        auto it = data.find(tag(key));
        if (it == data.end()) return std::nullopt;
        return it->second;
    }
    void store(const SeriesKey& key, const SeriesTerm& term) override { data[tag(key)] = term; }

    std::map<std::string, SeriesTerm> data;
    int loads = 0;

private:
    static std::string tag(const SeriesKey& k) {
        return std::to_string(k.q) + "/" + std::to_string(k.k) + "/" + std::to_string(k.s) + "/" + to_string(k.variant);
    }
};

}  // namespace

TEST_CASE("fiber_factors") {
    const auto fl = fiber_factors(2);
    REQUIRE(fl.factors.size() == 14);
    std::vector<std::string> printed;
    for (const auto& f : fl.factors) printed.push_back(f.format());
    CHECK(printed == std::vector<std::string>{"x2 - x1", "x3 - x2", "x4 - x3", "x5 - x4", "x6 - x5", "s - x6", "x1",
                                              "x3", "x5", "s", "x1 - 1", "x2 - 1", "x4 - 1", "x6 - 1"});
    std::size_t constants = 0;
    for (const auto& f : fl.factors) constants += f.is_constant();
    CHECK(constants == 1);
    CHECK(fiber_factors(2, FactorVariant::Cyclic).factors.size() == 15);

    std::mt19937 rng(11);
    for (int t = 0; t < 20; ++t) {
        const mpq_class s(static_cast<long>(rng() % 19) + 2, static_cast<long>(rng() % 5) + 1);
        if (s == 1) continue;
        std::array<mpq_class, 6> x;
        std::array<mpq_class, 7> full;
        for (std::size_t i = 0; i < 6; ++i) {
            x[i] = mpq_class(static_cast<long>(rng() % 21) - 10, static_cast<long>(rng() % 4) + 1);
            x[i].canonicalize();
            full[i] = x[i];
        }
        full[6] = s;
        CHECK(fiber_factors(s).evaluate(x) == family<mpq_class>(full, false));
        CHECK(fiber_factors(s, FactorVariant::Cyclic).evaluate(x) == family<mpq_class>(full, true));
    }
    for (long bad : {0L, 1L}) {
        try {
            fiber_factors(bad);
            FAIL("expected NotInBase");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::NotInBase);
        }
    }
}

TEST_CASE("quad_char") {
    const auto f3 = ExtField::create(3, 1);
    CHECK(quad_char(f3, 1) == 1);
    CHECK(quad_char(f3, 2) == -1);
    CHECK(quad_char(f3, 0) == 0);
    for (auto [p, k] : std::vector<std::pair<int, int>>{{3, 2}, {5, 2}, {7, 1}, {3, 3}, {11, 1}}) {
        const auto f = ExtField::create(static_cast<std::uint64_t>(p), k);
        std::vector<int> square(f.size(), -1);
        square[0] = 0;
        for (ExtField::Element y = 1; y < f.size(); ++y) square[f.mul(y, y)] = 1;
        for (ExtField::Element u = 0; u < f.size(); ++u) {
            CHECK(quad_char(f, u) == square[u]);
            CHECK(f.chi(u) == square[u]);
        }
    }
}

TEST_CASE("count_naive against integer enumeration over prime fields") {
    for (long p : {3L, 5L, 7L}) {
        const auto f = ExtField::create(static_cast<std::uint64_t>(p), 1);
        for (long s = 2; s < p; ++s) {
            for (bool cyclic : {false, true}) {
                const auto v = cyclic ? FactorVariant::Cyclic : FactorVariant::Consecutive;
                const auto [n, t] = oracle_prime(p, s, cyclic);
                const NaiveCount par = count_naive(f, f.from_int(s), v);
                const NaiveCount ser = count_naive(f, f.from_int(s), v, kDefaultBudget, Execution::Serial);
                CAPTURE(p);
                CAPTURE(s);
                CHECK(par.t_chi == t);
                CHECK(static_cast<long>(par.n_nonzero) == n);
                CHECK(ser.t_chi == par.t_chi);
                CHECK(ser.n_nonzero == par.n_nonzero);
            }
        }
    }
}

TEST_CASE("count_naive: F_3, s = 2") {
    const auto f = ExtField::create(3, 1);
    const NaiveCount c = count_naive(f, 2);
    CHECK(c.n_nonzero <= 729);
    CHECK(std::abs(c.t_chi) <= 729);
    CHECK(c.fiber_points() == oracle_double_cover(3, 2));
    const auto f5 = ExtField::create(5, 1);
    for (long s = 2; s < 5; ++s) CHECK(count_naive(f5, f5.from_int(s)).fiber_points() == oracle_double_cover(5, s));

    try {
        count_naive(f5, 2, FactorVariant::Consecutive, 10000);
        FAIL("expected TooLarge");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::TooLarge);
    }
    CHECK_THROWS_AS(count_naive(f, 1), Error);
    CHECK_THROWS_AS(count_naive(f, 0), Error);
}

TEST_CASE("count_transfer equals count_naive") {
    // every residue outside {0, 1} for q in {3, 5, 9}; F_25 at two residues
    for (auto [p, k] : std::vector<std::pair<int, int>>{{3, 1}, {5, 1}, {3, 2}, {5, 2}}) {
        const auto f = ExtField::create(static_cast<std::uint64_t>(p), k);
        std::vector<ExtField::Element> residues;
        for (ExtField::Element s = 2; s < f.size(); ++s) residues.push_back(s);
        if (f.size() == 25) residues = {2, 7};
        for (auto s : residues) {
            const NaiveCount naive = count_naive(f, s);
            CAPTURE(f.size());
            CAPTURE(s);
            CHECK(count_transfer(f, s, FactorVariant::Consecutive, Character::Quadratic, TransferMethod::Direct,
                                 Execution::Serial) == naive.t_chi);
            CHECK(count_transfer(f, s, FactorVariant::Consecutive, Character::Quadratic, TransferMethod::Direct) ==
                  naive.t_chi);
            CHECK(count_transfer(f, s, FactorVariant::Consecutive, Character::Quadratic, TransferMethod::Fourier) ==
                  naive.t_chi);
            // trivial character: the engine reproduces N_nonzero
            CHECK(count_transfer(f, s, FactorVariant::Consecutive, Character::Trivial) == naive.n_nonzero);
            if (f.size() < 25) {
                CHECK(count_transfer(f, s, FactorVariant::Cyclic) ==
                      count_naive(f, s, FactorVariant::Cyclic).t_chi);
            }
        }
    }
    const auto f3 = ExtField::create(3, 1);
    try {
        count_transfer(f3, 1);
        FAIL("expected NotInBase");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotInBase);
    }
}

TEST_CASE("direct and Fourier transfer agree on larger fields") {
    for (auto [p, k] : std::vector<std::pair<int, int>>{{3, 4}, {3, 5}, {7, 2}, {5, 3}, {11, 1}, {13, 2}}) {
        const auto f = ExtField::create(static_cast<std::uint64_t>(p), k);
        for (ExtField::Element s : {2U, f.size() - 1}) {
            const mpz_class d = count_transfer(f, s, FactorVariant::Consecutive, Character::Quadratic,
                                               TransferMethod::Direct, Execution::Serial);
            CHECK(count_transfer(f, s, FactorVariant::Consecutive, Character::Quadratic, TransferMethod::Fourier,
                                 Execution::Serial) == d);
            CHECK(count_transfer(f, s, FactorVariant::Consecutive, Character::Quadratic, TransferMethod::Fourier) == d);
        }
    }
}

TEST_CASE("Galois invariance and modulus independence") {
    for (auto [p, k] : std::vector<std::pair<int, int>>{{3, 2}, {3, 3}, {5, 2}, {3, 4}}) {
        const auto f = ExtField::create(static_cast<std::uint64_t>(p), k);
        for (ExtField::Element s = 2; s < std::min<ExtField::Element>(f.size(), 12); ++s) {
            const mpz_class t = count_transfer(f, s);
            CHECK(count_transfer(f, f.frobenius(s)) == t);
        }
        // the image of 2 under two presentations
        const auto g = ExtField::create(static_cast<std::uint64_t>(p), k, 1);
        CHECK(f.modulus() != g.modulus());
        CHECK(count_transfer(f, 2) == count_transfer(g, 2));
    }
}

TEST_CASE("chi_series") {
    SeriesOptions opts;
    opts.k_max = 3;
    opts.budget = 100000000;
    const ChiSeries a = chi_series(3, 2, opts);
    REQUIRE(a.terms.size() == 3);
    const auto f3 = ExtField::create(3, 1);
    CHECK(a.terms[0].t_chi == count_naive(f3, 2).t_chi);
    CHECK(a.terms[0].naive_checked);
    CHECK(a.terms[1].naive_checked);
    CHECK_FALSE(a.terms[2].naive_checked);  // 27^6 is above this budget
    CHECK(a.clean());
    CHECK(a.terms[0].alt_modulus.empty());
    CHECK_FALSE(a.terms[1].alt_modulus.empty());

    try {
        chi_series(3, 0, opts);
        FAIL("expected NotInBase");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotInBase);
    }
    CHECK_THROWS_AS(chi_series(3, 4, opts), Error);  // 4 = 1 mod 3

    int first_failing = 1;
    std::uint64_t size = 3;
    while (transfer_cost(size, 3, TransferMethod::Auto) <= 100000) {
        ++first_failing;
        size *= 3;
    }
    try {
        chi_series(3, 2, SeriesOptions{7, 100000});
        FAIL("expected TooLarge");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::TooLarge);
        CHECK(std::string(e.what()).find("k = " + std::to_string(first_failing)) != std::string::npos);
    }
}

TEST_CASE("chi_series to k = 7: determinism, workers, cache") {
    SeriesOptions opts;
    opts.k_max = 7;
    opts.budget = 100000000;
    const ChiSeries a = chi_series(3, 2, opts);
    CHECK(a.terms.size() == 7);
    CHECK(a.clean());
    opts.exec = Execution::Serial;
    opts.check_alt_modulus = false;
    const ChiSeries b = chi_series(3, 2, opts);
    CHECK(a.t_values() == b.t_values());

    MemoryCache cache;
    opts.cache = &cache;
    const ChiSeries c = chi_series(3, 2, opts);
    CHECK(cache.data.size() == 7);
    const ChiSeries d = chi_series(3, 2, opts);
    CHECK(d.t_values() == a.t_values());
    for (const auto& t : d.terms) CHECK(t.from_cache);
    for (const auto& t : c.terms) CHECK_FALSE(t.from_cache);

    // F_9 as base field: T_k(9) = T_{2k}(3) for s in the prime field
    SeriesOptions nine;
    nine.k_max = 3;
    nine.budget = 100000000;
    const ChiSeries e = chi_series(9, 2, nine);
    for (int k = 1; k <= 3; ++k) CHECK(e.terms[static_cast<std::size_t>(k - 1)].t_chi == a.terms[static_cast<std::size_t>(2 * k - 1)].t_chi);
}

TEST_CASE("berlekamp_massey") {
    std::vector<mpq_class> fib{1, 1, 2, 3, 5, 8, 13, 21};
    CHECK(berlekamp_massey(fib) == std::vector<mpq_class>{-1, -1, 1});
    std::vector<mpq_class> geo{3, 6, 12, 24};
    CHECK(berlekamp_massey(geo) == std::vector<mpq_class>{-2, 1});
}

TEST_CASE("zeta_analysis on synthetic series") {
    const std::uint64_t q = 3;
    auto series = [](auto term) {
        std::vector<mpz_class> t;
        for (unsigned k = 1; k <= 7; ++k) t.push_back(term(k));
        return t;
    };
    auto pw = [](unsigned long b, unsigned k) {
        mpz_class r;
        mpz_ui_pow_ui(r.get_mpz_t(), b, k);
        return r;
    };

    const ZetaReport one = zeta_analysis(q, series([&](unsigned k) -> mpz_class { return pw(27, k); }));
    CHECK(one.model_length == 1);
    CHECK(one.determined);
    CHECK(one.flags.empty());
    REQUIRE(one.spectrum.size() == 1);
    CHECK(one.spectrum[0].lambda.real() == doctest::Approx(27.0));
    CHECK(one.spectrum[0].rounded_count == 1);
    CHECK(one.q3_is_eigenvalue);
    CHECK(one.pure_weight6_roots == 1);
    CHECK(one.weil_ok);

    const ZetaReport two = zeta_analysis(q, series([&](unsigned k) -> mpz_class { return 2 * pw(27, k) + pw(9, k); }));
    CHECK(two.model_length == 2);
    CHECK(two.determined);
    REQUIRE(two.spectrum.size() == 2);
    CHECK(two.spectrum[0].lambda.real() == doctest::Approx(27.0));
    CHECK(two.spectrum[0].rounded_count == 2);
    CHECK(two.spectrum[1].lambda.real() == doctest::Approx(9.0));
    CHECK(two.spectrum[1].rounded_count == 1);
    CHECK(two.pure_weight6_count == 2);
    CHECK(two.fit_residual < 1e-9);

    // roots of x^2 - 10x + 729: a conjugate pair on |lambda| = 27, minus q^2
    std::vector<mpz_class> pair{10, 10 * 10 - 2 * 729};
    for (int k = 2; k < 7; ++k) {
        const mpz_class next = 10 * pair[static_cast<std::size_t>(k - 1)] - 729 * pair[static_cast<std::size_t>(k - 2)];
        pair.push_back(next);
    }
    for (unsigned k = 1; k <= 7; ++k) pair[k - 1] -= pw(9, k);
    const ZetaReport cx = zeta_analysis(q, pair);
    CHECK(cx.model_length == 3);
    CHECK(cx.determined);
    CHECK(cx.pure_weight6_roots == 2);
    CHECK_FALSE(cx.q3_is_eigenvalue);
    CHECK(cx.weil_ok);
    CHECK(cx.spectrum.back().rounded_count == -1);

    const ZetaReport big = zeta_analysis(q, series([&](unsigned k) -> mpz_class { return pw(28, k); }));
    CHECK_FALSE(big.weil_ok);

    // four generic terms cannot pin a model of length 2
    const ZetaReport under = zeta_analysis(q, {1, 5, -7, 30});
    CHECK_FALSE(under.determined);
    CHECK_FALSE(under.flags.empty());
}

TEST_CASE("zeta_analysis on the (3, 2) series") {
    SeriesOptions opts;
    opts.k_max = 7;
    opts.budget = 100000000;
    const ZetaReport z = zeta_analysis(chi_series(3, 2, opts));
    CHECK(z.terms_used == 7);
    CHECK(z.s == 2);
    // a generic sequence: length ceil(7 / 2), flagged as not determined
    CHECK(z.model_length == 4);
    CHECK_FALSE(z.determined);
    CHECK(z.max_normalized_trace < 7.0);
}

TEST_CASE("local_type_prediction") {
    const auto a = local_type_prediction(mpq_class(8, 5));
    REQUIRE(a.primes.size() == 2);
    CHECK(a.primes[0].p == 3);
    CHECK(a.primes[0].type == LocalType::U3U2U2);
    CHECK(a.primes[1].p == 5);
    CHECK(a.primes[1].type == LocalType::SteinbergU7);
    CHECK(a.hypothesis_shape);
    CHECK(a.steinberg_frobenius_exponents == std::vector<int>{0, 1, 2, 3, 4, 5, 6});

    const auto b = local_type_prediction(10);
    for (const auto& lp : b.primes) CHECK(lp.type != LocalType::SteinbergU7);
    REQUIRE(b.primes.size() == 2);
    CHECK(b.primes[0].p == 3);
    CHECK(b.primes[0].type == LocalType::U3U2U2);
    CHECK(b.primes[1].p == 5);
    CHECK(b.primes[1].type == LocalType::None);

    CHECK(local_type_prediction(mpq_class(1, 2)).primes.empty());
    const auto two = local_type_prediction(2);
    CHECK(two.primes.empty());
    CHECK_FALSE(two.hypothesis_shape);
    for (long bad : {0L, 1L}) {
        try {
            local_type_prediction(bad);
            FAIL("expected NotInBase");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::NotInBase);
        }
    }

    // types against valuations, for random rationals
    std::mt19937 rng(5);
    for (int t = 0; t < 200; ++t) {
        mpq_class s(static_cast<long>(rng() % 2001) - 1000, static_cast<long>(rng() % 300) + 1);
        s.canonicalize();
        if (s == 0 || s == 1) continue;
        for (const auto& lp : local_type_prediction(s).primes) {
            CHECK(lp.p % 2 == 1);
            CHECK(lp.nu_s == valuation(s, lp.p));
            const bool st = lp.nu_s < 0, u = valuation(1 - s, lp.p) > 0;
            CHECK_FALSE((st && u));
            CHECK((lp.type == LocalType::SteinbergU7) == st);
            CHECK((lp.type == LocalType::U3U2U2) == u);
        }
    }
}
