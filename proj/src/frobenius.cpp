#include "g2rigid/frobenius.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/Dense>
#include <unsupported/Eigen/Polynomials>

#include "g2rigid/fields.hpp"

namespace g2rigid {

using Element = ExtField::Element;

std::string to_string(FactorVariant v) {
    return v == FactorVariant::Consecutive ? "consecutive" : "cyclic";
}

FactorVariant parse_factor_variant(const std::string& s) {
    if (s == "consecutive") return FactorVariant::Consecutive;
    if (s == "cyclic") return FactorVariant::Cyclic;
    throw Error(ErrorKind::ParseError, "unknown factor variant '" + s + "'");
}

bool LinearFactor::is_constant() const {
    return std::all_of(a.begin(), a.end(), [](int v) { return v == 0; });
}

std::string LinearFactor::format() const {
    std::vector<std::pair<int, std::string>> terms;
    for (std::size_t j = 0; j < 6; ++j)
        if (a[j] != 0) terms.emplace_back(a[j], "x" + std::to_string(j + 1));
    if (cs != 0) terms.emplace_back(cs, "s");
    if (c0 != 0) terms.emplace_back(c0, "");
    std::stable_partition(terms.begin(), terms.end(), [](const auto& t) { return t.first > 0; });
    std::string out;
    for (const auto& [c, name] : terms) {
        const int mag = std::abs(c);
        std::string body = name.empty() ? std::to_string(mag) : (mag == 1 ? name : std::to_string(mag) + "*" + name);
        if (out.empty()) {
            out = (c < 0 ? "-" : "") + body;
        } else {
            out += (c < 0 ? " - " : " + ") + body;
        }
    }
    return out.empty() ? "0" : out;
}

std::vector<LinearFactor> fiber_factor_shapes(FactorVariant variant) {
    std::vector<LinearFactor> out;
    auto var = [](int j, int c) {
        LinearFactor f;
        f.a[static_cast<std::size_t>(j)] = c;
        return f;
    };
    for (int j = 1; j < 6; ++j) {
        LinearFactor f = var(j, 1);
        f.a[static_cast<std::size_t>(j - 1)] = -1;
        out.push_back(f);
    }
    LinearFactor last = var(5, -1);
    last.cs = 1;
    out.push_back(last);
    for (int j : {0, 2, 4}) out.push_back(var(j, 1));
    LinearFactor x7;
    x7.cs = 1;
    out.push_back(x7);
    for (int j : {0, 1, 3, 5}) {
        LinearFactor f = var(j, 1);
        f.c0 = -1;
        out.push_back(f);
    }
    if (variant == FactorVariant::Cyclic) {
        LinearFactor wrap = var(0, 1);
        wrap.cs = -1;
        out.push_back(wrap);
    }
    return out;
}

FiberFactorList fiber_factors(const mpq_class& s, FactorVariant variant) {
    if (s == 0 || s == 1) throw Error(ErrorKind::NotInBase, "s = " + s.get_str() + " is not in A^1 minus {0, 1}");
    return FiberFactorList{s, variant, fiber_factor_shapes(variant)};
}

mpq_class FiberFactorList::evaluate(const std::array<mpq_class, 6>& x) const {
    mpq_class prod = 1;
    for (const auto& f : factors) {
        mpq_class v = f.c0 + f.cs * s;
        for (std::size_t j = 0; j < 6; ++j) v += f.a[j] * x[j];
        prod *= v;
    }
    return prod;
}

std::string FiberFactorList::format() const {
    std::string out;
    for (const auto& f : factors) out += "(" + f.format() + ")";
    return out + " with s = " + s.get_str();
}

int quad_char(const ExtField& f, Element u) {
    if (u == 0) return 0;
    return f.pow(u, (f.size() - 1) / 2) == f.one() ? 1 : -1;
}

namespace {

Element constant_value(const ExtField& f, const LinearFactor& lf, Element s) {
    return f.add(f.from_int(lf.c0), f.mul(f.from_int(lf.cs), s));
}

void check_base(const ExtField& f, Element s) {
    if (s == f.zero() || s == f.one())
        throw Error(ErrorKind::NotInBase, "s = " + f.format(s) + " is 0 or 1 in F_" + std::to_string(f.size()));
}

// A factor compiled for evaluation: value = c + sum coeff * x[var].
struct Compiled {
    std::vector<std::pair<std::size_t, Element>> terms;
    Element c = 0;
    int level = -1;  // largest variable index, -1 for constants

    Element eval(const ExtField& f, const Element* x) const {
        Element v = c;
        for (const auto& [j, a] : terms) v = f.add(v, f.mul(a, x[j]));
        return v;
    }
};

std::vector<Compiled> compile(const ExtField& f, const std::vector<LinearFactor>& factors, Element s) {
    std::vector<Compiled> out;
    for (const auto& lf : factors) {
        Compiled c;
        c.c = constant_value(f, lf, s);
        for (std::size_t j = 0; j < 6; ++j)
            if (lf.a[j] != 0) {
                c.terms.emplace_back(j, f.from_int(lf.a[j]));
                c.level = static_cast<int>(j);
            }
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<std::int8_t> character_table(const ExtField& f, Character chi) {
    if (chi == Character::Quadratic) return f.chi_table();
    std::vector<std::int8_t> t(f.size(), 1);
    t[0] = 0;
    return t;
}

}  // namespace

Element evaluate_fiber(const ExtField& f, const std::vector<LinearFactor>& factors, Element s,
                       const std::array<Element, 6>& x) {
    Element prod = f.one();
    for (const auto& c : compile(f, factors, s)) prod = f.mul(prod, c.eval(f, x.data()));
    return prod;
}

NaiveCount count_naive(const ExtField& f, Element s, FactorVariant variant, std::uint64_t budget, Execution exec) {
    check_base(f, s);
    const std::uint64_t q = f.size();
    const double points = std::pow(static_cast<double>(q), 6);
    if (points > static_cast<double>(budget))
        throw Error(ErrorKind::TooLarge, "naive enumeration of F_" + std::to_string(q) + "^6 exceeds the budget of " +
                                             std::to_string(budget));
    const auto factors = fiber_factor_shapes(variant);
    const auto& chi = f.chi_table();
    NaiveCount out;

    if (exec == Execution::Serial) {
        const std::uint64_t total = q * q * q * q * q * q;
        std::array<Element, 6> x{};
        for (std::uint64_t idx = 0; idx < total; ++idx) {
            std::uint64_t r = idx;
            for (auto& xi : x) {
                xi = static_cast<Element>(r % q);
                r /= q;
            }
            const Element v = evaluate_fiber(f, factors, s, x);
            out.n_nonzero += v != 0;
            out.t_chi += chi[v];
        }
        return out;
    }

    const auto compiled = compile(f, factors, s);
    std::array<std::vector<const Compiled*>, 6> at_level;
    Element base = f.one();
    for (const auto& c : compiled) {
        if (c.level < 0) {
            base = f.mul(base, c.c);
        } else {
            at_level[static_cast<std::size_t>(c.level)].push_back(&c);
        }
    }
    std::uint64_t n_total = 0;
    std::int64_t t_total = 0;
    const std::int64_t q2 = static_cast<std::int64_t>(q * q);
#pragma omp parallel for schedule(dynamic) reduction(+ : n_total, t_total)
    for (std::int64_t outer = 0; outer < q2; ++outer) {
        Element x[6];
        x[0] = static_cast<Element>(static_cast<std::uint64_t>(outer) / q);
        x[1] = static_cast<Element>(static_cast<std::uint64_t>(outer) % q);
        auto extend = [&](Element acc, std::size_t level) {
            for (const Compiled* c : at_level[level]) acc = f.mul(acc, c->eval(f, x));
            return acc;
        };
        const Element p1 = extend(extend(base, 0), 1);
        if (p1 == 0) continue;
        for (x[2] = 0; x[2] < q; ++x[2]) {
            const Element p2 = extend(p1, 2);
            if (p2 == 0) continue;
            for (x[3] = 0; x[3] < q; ++x[3]) {
                const Element p3 = extend(p2, 3);
                if (p3 == 0) continue;
                for (x[4] = 0; x[4] < q; ++x[4]) {
                    const Element p4 = extend(p3, 4);
                    if (p4 == 0) continue;
                    for (x[5] = 0; x[5] < q; ++x[5]) {
                        const Element p5 = extend(p4, 5);
                        n_total += p5 != 0;
                        t_total += chi[p5];
                    }
                }
            }
        }
    }
    out.n_nonzero = n_total;
    out.t_chi = t_total;
    return out;
}

namespace {

// The chain decomposition of f_s: per-variable weights w_j(b) = prod chi(unary
// factors of x_j at b), kernels K_j(d) = prod chi(factors in x_j - x_{j-1} = d)
// for j = 1..5, and the product of constant factors.
struct Chain {
    std::array<std::vector<std::int8_t>, 6> weight;
    std::array<std::vector<std::int8_t>, 6> kernel;  // kernel[0] unused
    int constant = 1;
};

Chain build_chain(const ExtField& f, Element s, FactorVariant variant, Character chi) {
    const auto table = character_table(f, chi);
    const std::uint32_t q = f.size();
    Chain ch;
    for (auto& w : ch.weight) w.assign(q, 1);
    for (std::size_t j = 1; j < 6; ++j) ch.kernel[j].assign(q, 1);
    for (const auto& lf : fiber_factor_shapes(variant)) {
        std::vector<std::size_t> vars;
        for (std::size_t j = 0; j < 6; ++j)
            if (lf.a[j] != 0) vars.push_back(j);
        const Element c = constant_value(f, lf, s);
        if (vars.empty()) {
            ch.constant *= table[c];
        } else if (vars.size() == 1) {
            const Element a = f.from_int(lf.a[vars[0]]);
            auto& w = ch.weight[vars[0]];
            for (Element b = 0; b < q; ++b) w[b] = static_cast<std::int8_t>(w[b] * table[f.add(f.mul(a, b), c)]);
        } else if (vars.size() == 2 && vars[1] == vars[0] + 1 && lf.a[vars[0]] == -lf.a[vars[1]]) {
            const Element u = f.from_int(lf.a[vars[1]]);
            auto& k = ch.kernel[vars[1]];
            for (Element d = 0; d < q; ++d) k[d] = static_cast<std::int8_t>(k[d] * table[f.add(f.mul(u, d), c)]);
        } else {
            throw Error(ErrorKind::DegenerateInput, "factor " + lf.format() + " does not fit the transfer chain");
        }
    }
    return ch;
}

bool direct_fits(std::uint64_t q) {
    return 6.0 * std::log2(static_cast<double>(q)) < 125.0;
}

mpz_class from_i128(__int128 v) {
    const bool neg = v < 0;
    unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1 : static_cast<unsigned __int128>(v);
    mpz_class hi = static_cast<unsigned long>(static_cast<std::uint64_t>(u >> 64));
    mpz_class lo = static_cast<unsigned long>(static_cast<std::uint64_t>(u));
    mpz_class r = (hi << 64) + lo;
    return neg ? mpz_class(-r) : r;
}

mpz_class transfer_direct(const ExtField& f, const Chain& ch, Execution exec) {
    const std::int64_t q = f.size();
    std::vector<__int128> v(ch.weight[0].begin(), ch.weight[0].end());
    std::vector<__int128> w(static_cast<std::size_t>(q));
    const bool par = exec == Execution::Parallel;
    for (std::size_t j = 1; j < 6; ++j) {
        const auto& k = ch.kernel[j];
        const auto& wt = ch.weight[j];
#pragma omp parallel for schedule(static) if (par)
        for (std::int64_t b = 0; b < q; ++b) {
            __int128 acc = 0;
            if (wt[static_cast<std::size_t>(b)] != 0) {
                for (std::int64_t a = 0; a < q; ++a) {
                    const __int128 va = v[static_cast<std::size_t>(a)];
                    if (va == 0) continue;
                    acc += va * k[f.sub(static_cast<Element>(b), static_cast<Element>(a))];
                }
            }
            w[static_cast<std::size_t>(b)] = acc * wt[static_cast<std::size_t>(b)];
        }
        v.swap(w);
    }
    __int128 total = 0;
    for (auto x : v) total += x;
    return from_i128(total * ch.constant);
}

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    for (; e != 0; e >>= 1U, a = mulmod(a, a, m))
        if ((e & 1U) != 0) r = mulmod(r, a, m);
    return r;
}

// Primes P < 2^62 with P = 1 mod p, largest first.
std::vector<std::uint64_t> fourier_primes(std::uint64_t p, std::size_t count) {
    std::vector<std::uint64_t> out;
    const std::uint64_t step = 2 * p;
    std::uint64_t cand = ((1ULL << 62) - 1) / step * step + 1;
    while (out.size() < count) {
        if (cand < (1ULL << 62) && is_prime(cand)) out.push_back(cand);
        cand -= step;
    }
    return out;
}

std::size_t primes_needed(std::uint64_t q) {
    const double bits = 6.0 * std::log2(static_cast<double>(q)) + 3.0;
    return static_cast<std::size_t>(std::ceil(bits / 61.0));
}

// In-place transform over (Z/p)^k in the digit encoding of F.
void additive_dft(std::vector<std::uint64_t>& v, std::uint32_t p, int k, const std::vector<std::uint64_t>& root_powers,
                  std::uint64_t P, bool par) {
    const std::int64_t q = static_cast<std::int64_t>(v.size());
    std::uint64_t stride = 1;
    for (int axis = 0; axis < k; ++axis, stride *= p) {
        const std::int64_t lines = q / p;
#pragma omp parallel if (par)
        {
            std::vector<std::uint64_t> in(p), out(p);
#pragma omp for schedule(static)
            for (std::int64_t line = 0; line < lines; ++line) {
                const std::uint64_t lo = static_cast<std::uint64_t>(line) % stride;
                const std::uint64_t hi = static_cast<std::uint64_t>(line) / stride;
                const std::uint64_t base = hi * stride * p + lo;
                for (std::uint32_t r = 0; r < p; ++r) in[r] = v[base + r * stride];
                for (std::uint32_t t = 0; t < p; ++t) {
                    unsigned __int128 acc = 0;
                    std::uint64_t e = 0;  // r * t mod p
                    for (std::uint32_t r = 0; r < p; ++r) {
                        acc += static_cast<unsigned __int128>(in[r]) * root_powers[e];
                        if ((r & 7U) == 7U) acc %= P;
                        e += t;
                        if (e >= p) e -= p;
                    }
                    out[t] = static_cast<std::uint64_t>(acc % P);
                }
                for (std::uint32_t t = 0; t < p; ++t) v[base + t * stride] = out[t];
            }
        }
    }
}

std::uint64_t to_residue(int x, std::uint64_t P) {
    return x >= 0 ? static_cast<std::uint64_t>(x) : P - static_cast<std::uint64_t>(-x);
}

std::uint64_t transfer_mod(const ExtField& f, const Chain& ch, std::uint64_t P, bool par) {
    const std::uint32_t p = f.characteristic();
    const std::uint32_t q = f.size();
    std::uint64_t g = 2;
    std::uint64_t omega = 1;
    while (omega == 1) omega = powmod(g++, (P - 1) / p, P);
    std::vector<std::uint64_t> fwd(p), bwd(p);
    for (std::uint32_t i = 0; i < p; ++i) {
        fwd[i] = powmod(omega, i, P);
        bwd[i] = powmod(omega, (p - i) % p, P);
    }
    const std::uint64_t q_inv = powmod(q % P, P - 2, P);

    std::vector<std::uint64_t> v(q);
    for (std::uint32_t b = 0; b < q; ++b) v[b] = to_residue(ch.weight[0][b], P);
    for (std::size_t j = 1; j < 6; ++j) {
        std::vector<std::uint64_t> kh(q);
        for (std::uint32_t d = 0; d < q; ++d) kh[d] = to_residue(ch.kernel[j][d], P);
        additive_dft(kh, p, f.degree(), fwd, P, par);
        additive_dft(v, p, f.degree(), fwd, P, par);
        for (std::uint32_t x = 0; x < q; ++x) v[x] = mulmod(mulmod(v[x], kh[x], P), q_inv, P);
        additive_dft(v, p, f.degree(), bwd, P, par);
        for (std::uint32_t b = 0; b < q; ++b) v[b] = mulmod(v[b], to_residue(ch.weight[j][b], P), P);
    }
    unsigned __int128 total = 0;
    for (auto x : v) total += x;
    return mulmod(static_cast<std::uint64_t>(total % P), to_residue(ch.constant, P), P);
}

mpz_class transfer_fourier(const ExtField& f, const Chain& ch, Execution exec) {
    const auto primes = fourier_primes(f.characteristic(), primes_needed(f.size()));
    mpz_class x = 0, m = 1;
    for (std::uint64_t P : primes) {
        const std::uint64_t r = transfer_mod(f, ch, P, exec == Execution::Parallel);
        const mpz_class Pz = static_cast<unsigned long>(P);
        mpz_class diff = (mpz_class(static_cast<unsigned long>(r)) - x) % Pz;
        if (diff < 0) diff += Pz;
        mpz_class m_inv;
        mpz_invert(m_inv.get_mpz_t(), mpz_class(m % Pz).get_mpz_t(), Pz.get_mpz_t());
        mpz_class t = diff * m_inv % Pz;
        x += m * t;
        m *= Pz;
    }
    if (2 * x > m) x -= m;
    return x;
}

}  // namespace

double transfer_cost(std::uint64_t field_size, std::uint64_t p, TransferMethod method) {
    const double q = static_cast<double>(field_size);
    if (method == TransferMethod::Direct) return 5.0 * q * q;
    if (method == TransferMethod::Fourier) {
        const double k = std::round(std::log(q) / std::log(static_cast<double>(p)));
        return static_cast<double>(primes_needed(field_size)) * 5.0 * (3.0 * q * k * static_cast<double>(p) + 3.0 * q);
    }
    return std::min(direct_fits(field_size) ? transfer_cost(field_size, p, TransferMethod::Direct) : INFINITY,
                    transfer_cost(field_size, p, TransferMethod::Fourier));
}

namespace {

TransferMethod resolve_method(std::uint64_t size, std::uint64_t p) {
    return direct_fits(size) && transfer_cost(size, p, TransferMethod::Direct) <= 1e8 ? TransferMethod::Direct
                                                                                     : TransferMethod::Fourier;
}

}  // namespace

mpz_class count_transfer(const ExtField& f, Element s, FactorVariant variant, Character chi, TransferMethod method,
                         Execution exec) {
    check_base(f, s);
    const Chain ch = build_chain(f, s, variant, chi);
    if (method == TransferMethod::Auto) method = resolve_method(f.size(), f.characteristic());
    if (method == TransferMethod::Direct) {
        if (!direct_fits(f.size()))
            throw Error(ErrorKind::TooLarge, "direct transfer over F_" + std::to_string(f.size()) + " may overflow");
        return transfer_direct(f, ch, exec);
    }
    return transfer_fourier(f, ch, exec);
}

std::vector<mpz_class> ChiSeries::t_values() const {
    std::vector<mpz_class> out;
    for (const auto& t : terms) out.push_back(t.t_chi);
    return out;
}

bool ChiSeries::clean() const {
    return std::all_of(terms.begin(), terms.end(), [](const SeriesTerm& t) { return t.clean(); });
}

namespace {

std::pair<std::uint64_t, int> prime_power(std::uint64_t q) {
    if (q < 3) throw Error(ErrorKind::InvalidCharacteristic, "q must be an odd prime power");
    std::uint64_t p = 0;
    for (std::uint64_t d = 2; d * d <= q; ++d)
        if (q % d == 0) {
            p = d;
            break;
        }
    if (p == 0) p = q;
    int e = 0;
    std::uint64_t r = q;
    while (r % p == 0) {
        r /= p;
        ++e;
    }
    if (r != 1 || p == 2) throw Error(ErrorKind::InvalidCharacteristic, std::to_string(q) + " is not an odd prime power");
    return {p, e};
}

bool term_feasible(std::uint64_t p, int degree, std::uint64_t budget) {
    const double size = std::pow(static_cast<double>(p), degree);
    return size <= static_cast<double>(1U << 24) &&
           transfer_cost(static_cast<std::uint64_t>(size), p, TransferMethod::Auto) <= static_cast<double>(budget);
}

}  // namespace

int first_infeasible_k(std::uint64_t q, int k_max, std::uint64_t budget) {
    const auto [p, e] = prime_power(q);
    for (int k = 1; k <= k_max; ++k)
        if (!term_feasible(p, e * k, budget)) return k;
    return 0;
}

ChiSeries chi_series(std::uint64_t q, std::int64_t s, const SeriesOptions& opts) {
    const auto [p, e] = prime_power(q);
    const std::int64_t pi = static_cast<std::int64_t>(p);
    const std::int64_t sr = ((s % pi) + pi) % pi;
    if (sr == 0 || sr == 1)
        throw Error(ErrorKind::NotInBase, "s = " + std::to_string(s) + " is 0 or 1 in F_" + std::to_string(q));
    if (opts.k_max < 1) throw Error(ErrorKind::ParseError, "k_max must be positive");

    ChiSeries out{q, sr, opts.variant, {}};
    for (int k = 1; k <= opts.k_max; ++k) {
        const SeriesKey key{q, k, sr, opts.variant};
        if (opts.cache != nullptr) {
            if (auto hit = opts.cache->load(key)) {
                hit->from_cache = true;
                out.terms.push_back(*hit);
                continue;
            }
        }
        const int degree = e * k;
        const double size = std::pow(static_cast<double>(p), degree);
        if (!term_feasible(p, degree, opts.budget))
            throw Error(ErrorKind::TooLarge, "k = " + std::to_string(k) + ": F_" + std::to_string(q) + "^" +
                                                 std::to_string(k) + " exceeds the budget");

        const ExtField f = ExtField::create(p, degree, 0);
        const Element se = f.from_int(sr);
        SeriesTerm term;
        term.k = k;
        term.field_size = f.size();
        term.modulus = f.modulus_string();
        term.t_chi = count_transfer(f, se, opts.variant, Character::Quadratic, TransferMethod::Auto, opts.exec);
        term.n_nonzero = count_transfer(f, se, opts.variant, Character::Trivial, TransferMethod::Auto, opts.exec);
        term.method = resolve_method(f.size(), p) == TransferMethod::Direct ? "direct" : "fourier";
        if (opts.check_naive && size * size * size * size * size * size <= static_cast<double>(opts.budget)) {
            const NaiveCount naive = count_naive(f, se, opts.variant, opts.budget, opts.exec);
            term.naive_checked = true;
            term.naive_agrees = term.t_chi == naive.t_chi && term.n_nonzero == naive.n_nonzero;
        }
        if (opts.check_alt_modulus && degree > 1) {
            const ExtField g = ExtField::create(p, degree, 1);
            term.alt_modulus = g.modulus_string();
            term.alt_agrees =
                count_transfer(g, g.from_int(sr), opts.variant, Character::Quadratic, TransferMethod::Auto, opts.exec) ==
                term.t_chi;
        }
        if (opts.cache != nullptr) opts.cache->store(key, term);
        out.terms.push_back(std::move(term));
    }
    return out;
}

std::vector<mpq_class> berlekamp_massey(const std::vector<mpq_class>& seq) {
    std::vector<mpq_class> c{1}, b{1};
    std::size_t l = 0, m = 1;
    mpq_class bd = 1;
    for (std::size_t n = 0; n < seq.size(); ++n) {
        mpq_class d = seq[n];
        for (std::size_t i = 1; i <= l && i < c.size(); ++i) d += c[i] * seq[n - i];
        if (d == 0) {
            ++m;
            continue;
        }
        const mpq_class coef = d / bd;
        std::vector<mpq_class> next = c;
        if (next.size() < b.size() + m) next.resize(b.size() + m, 0);
        for (std::size_t i = 0; i < b.size(); ++i) next[i + m] -= coef * b[i];
        if (2 * l <= n) {
            b = c;
            l = n + 1 - l;
            bd = d;
            m = 1;
        } else {
            ++m;
        }
        c = std::move(next);
    }
    c.resize(l + 1, 0);
    // connection polynomial 1 + c1 x + ... -> characteristic x^L + c1 x^{L-1} + ...
    return std::vector<mpq_class>(c.rbegin(), c.rend());
}

namespace {

using QPoly = std::vector<mpq_class>;  // low degree first

void qtrim(QPoly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

QPoly qderiv(const QPoly& a) {
    QPoly d;
    for (std::size_t i = 1; i < a.size(); ++i) d.push_back(a[i] * static_cast<long>(i));
    qtrim(d);
    return d;
}

std::pair<QPoly, QPoly> qdivmod(QPoly a, const QPoly& b) {
    qtrim(a);
    if (a.size() < b.size()) return {{}, a};
    QPoly quot(a.size() - b.size() + 1, 0);
    while (a.size() >= b.size() && !a.empty()) {
        const std::size_t shift = a.size() - b.size();
        const mpq_class c = a.back() / b.back();
        quot[shift] = c;
        for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= c * b[i];
        qtrim(a);
    }
    qtrim(quot);
    return {quot, a};
}

QPoly qmonic(QPoly a) {
    const mpq_class lead = a.back();
    for (auto& c : a) c /= lead;
    return a;
}

QPoly qgcd(QPoly a, QPoly b) {
    qtrim(a);
    qtrim(b);
    while (!b.empty()) {
        QPoly r = qdivmod(a, b).second;
        a = std::move(b);
        b = std::move(r);
    }
    return a.empty() ? a : qmonic(a);
}

// Yun's square-free decomposition of a monic polynomial: factors[m-1] has
// the roots of multiplicity exactly m.
std::vector<QPoly> squarefree(const QPoly& f) {
    std::vector<QPoly> out;
    QPoly a = f;
    QPoly b = qderiv(a);
    QPoly c = qgcd(a, b);
    if (c.empty()) c = {1};
    QPoly w = qdivmod(a, c).first;
    while (w.size() > 1) {
        QPoly y = qgcd(w, c);
        out.push_back(qdivmod(w, y).first);
        w = y;
        c = qdivmod(c, y).first;
    }
    return out;
}

std::vector<std::complex<double>> numeric_roots(const QPoly& g, double scale) {
    const int deg = static_cast<int>(g.size()) - 1;
    if (deg < 1) return {};
    if (deg == 1) return {std::complex<double>(mpq_class(-g[0] / g[1]).get_d(), 0.0)};
    // roots of g(scale * y), rescaled
    Eigen::VectorXd coeffs(deg + 1);
    mpq_class power = 1;
    for (int i = 0; i <= deg; ++i) {
        coeffs[i] = mpq_class(g[static_cast<std::size_t>(i)] * power).get_d();
        power *= mpq_class(scale);
    }
    coeffs /= coeffs[deg];
    Eigen::PolynomialSolver<double, Eigen::Dynamic> solver;
    solver.compute(coeffs);
    std::vector<std::complex<double>> out;
    for (const auto& r : solver.roots()) out.push_back(r * scale);
    return out;
}

}  // namespace

ZetaReport zeta_analysis(std::uint64_t q, const std::vector<mpz_class>& t_values) {
    ZetaReport rep;
    rep.q = q;
    rep.terms_used = t_values.size();
    const double q3 = std::pow(static_cast<double>(q), 3);
    rep.weil_bound = q3 * (1 + kModulusTolerance);
    if (std::all_of(t_values.begin(), t_values.end(), [](const mpz_class& t) { return t == 0; })) {
        rep.recurrence = {1};
        rep.determined = !t_values.empty();
        rep.flags.push_back("zero series: empty spectrum");
        return rep;
    }
    mpz_class q3k = 1;
    for (const auto& t : t_values) {
        q3k *= static_cast<unsigned long>(q * q * q);
        rep.max_normalized_trace = std::max(rep.max_normalized_trace, std::abs(mpq_class(t, q3k).get_d()));
    }
    std::vector<mpq_class> seq(t_values.begin(), t_values.end());
    rep.recurrence = berlekamp_massey(seq);
    rep.model_length = rep.recurrence.size() - 1;
    rep.determined = 2 * rep.model_length < rep.terms_used;
    if (!rep.determined)
        rep.flags.push_back("underdetermined: model length " + std::to_string(rep.model_length) + " needs " +
                            std::to_string(2 * rep.model_length + 1) + " terms, have " +
                            std::to_string(rep.terms_used));

    mpq_class at_q3 = 0, q3q = mpq_class(static_cast<unsigned long>(q * q * q));
    for (auto it = rep.recurrence.rbegin(); it != rep.recurrence.rend(); ++it) at_q3 = at_q3 * q3q + *it;
    rep.q3_is_eigenvalue = at_q3 == 0;

    const auto parts = squarefree(rep.recurrence);
    std::vector<std::complex<double>> roots;
    for (std::size_t m = 0; m < parts.size(); ++m) {
        for (const auto& r : numeric_roots(parts[m], q3)) {
            SpectralTerm t;
            t.lambda = r;
            t.modulus = std::abs(r);
            t.multiplicity = static_cast<int>(m + 1);
            rep.spectrum.push_back(t);
        }
        if (m > 0 && parts[m].size() > 1) rep.flags.push_back("repeated roots: not a pure power sum");
    }
    std::sort(rep.spectrum.begin(), rep.spectrum.end(), [](const SpectralTerm& a, const SpectralTerm& b) {
        if (a.modulus != b.modulus) return a.modulus > b.modulus;
        if (a.lambda.real() != b.lambda.real()) return a.lambda.real() > b.lambda.real();
        return a.lambda.imag() > b.lambda.imag();
    });

    // eps_i from T_k / q^{3k} = sum eps_i (lambda_i / q^3)^k, least squares
    const Eigen::Index n = static_cast<Eigen::Index>(t_values.size());
    const Eigen::Index r = static_cast<Eigen::Index>(rep.spectrum.size());
    if (r > 0) {
        Eigen::MatrixXcd a(n, r);
        Eigen::VectorXcd rhs(n);
        mpz_class q3k = 1;
        for (Eigen::Index k = 0; k < n; ++k) {
            q3k *= static_cast<unsigned long>(q * q * q);
            rhs[k] = mpq_class(t_values[static_cast<std::size_t>(k)], q3k).get_d();
            for (Eigen::Index i = 0; i < r; ++i)
                a(k, i) = std::pow(rep.spectrum[static_cast<std::size_t>(i)].lambda / q3, static_cast<double>(k + 1));
        }
        const Eigen::VectorXcd eps = a.completeOrthogonalDecomposition().solve(rhs);
        for (Eigen::Index i = 0; i < r; ++i) {
            auto& t = rep.spectrum[static_cast<std::size_t>(i)];
            t.count = eps[i].real();
            t.rounded_count = std::lround(t.count);
        }
        double worst = 0;
        for (Eigen::Index k = 0; k < n; ++k) {
            std::complex<double> acc = 0;
            for (Eigen::Index i = 0; i < r; ++i)
                acc += static_cast<double>(rep.spectrum[static_cast<std::size_t>(i)].rounded_count) * a(k, i);
            const double scale = std::max(1.0, std::abs(rhs[k]));
            worst = std::max(worst, std::abs(acc - rhs[k]) / scale);
        }
        rep.fit_residual = worst;
        if (worst > 1e-6) rep.flags.push_back("signed counts are not integral");
    }

    for (const auto& t : rep.spectrum) {
        if (t.modulus < 1e-9 * q3) rep.flags.push_back("zero root in recurrence");
        rep.max_modulus = std::max(rep.max_modulus, t.modulus);
        if (std::abs(t.modulus - q3) <= kModulusTolerance * q3) {
            ++rep.pure_weight6_roots;
            rep.pure_weight6_count += t.rounded_count;
        }
    }
    rep.weil_ok = rep.max_modulus <= rep.weil_bound;
    if (!rep.weil_ok) rep.flags.push_back("fitted modulus above q^3");
    return rep;
}

ZetaReport zeta_analysis(const ChiSeries& series) {
    ZetaReport rep = zeta_analysis(series.q, series.t_values());
    rep.s = series.s;
    return rep;
}

std::string to_string(LocalType t) {
    switch (t) {
        case LocalType::SteinbergU7:
            return "Steinberg-U(7)";
        case LocalType::U3U2U2:
            return "U(3)+U(2)+U(2)";
        case LocalType::None:
            return "none";
    }
    return "none";
}

long valuation(const mpq_class& x, const mpz_class& p) {
    if (x == 0) throw Error(ErrorKind::InvalidScalar, "valuation of 0");
    long v = 0;
    mpz_class n = x.get_num(), d = x.get_den();
    while (mpz_divisible_p(n.get_mpz_t(), p.get_mpz_t()) != 0) {
        n /= p;
        ++v;
    }
    while (mpz_divisible_p(d.get_mpz_t(), p.get_mpz_t()) != 0) {
        d /= p;
        --v;
    }
    return v;
}

namespace {

void prime_divisors(mpz_class n, std::set<mpz_class>& out) {
    n = abs(n);
    for (unsigned long d = 2; d <= 10000000UL && mpz_class(d) * d <= n; ++d) {
        if (mpz_divisible_ui_p(n.get_mpz_t(), d) == 0) continue;
        out.insert(mpz_class(d));
        while (mpz_divisible_ui_p(n.get_mpz_t(), d) != 0) n /= d;
    }
    if (n <= 1) return;
    if (mpz_probab_prime_p(n.get_mpz_t(), 40) == 0)
        throw Error(ErrorKind::TooLarge, "cannot factor " + n.get_str() + " by trial division");
    out.insert(n);
}

bool has_odd_prime(const mpz_class& n) {
    mpz_class m = abs(n);
    if (m == 0) return false;
    while (mpz_even_p(m.get_mpz_t()) != 0) m /= 2;
    return m > 1;
}

}  // namespace

LocalTypePrediction local_type_prediction(const mpq_class& s) {
    if (s == 0 || s == 1) throw Error(ErrorKind::NotInBase, "s = " + s.get_str() + " is not in A^1 minus {0, 1}");
    LocalTypePrediction out;
    out.s = s;
    const mpq_class one_minus = 1 - s;
    std::set<mpz_class> primes;
    for (const mpz_class& n : {mpz_class(s.get_num()), mpz_class(s.get_den()), mpz_class(one_minus.get_num())})
        prime_divisors(n, primes);
    for (const auto& p : primes) {
        if (p == 2) continue;
        LocalPrediction lp;
        lp.p = p;
        lp.nu_s = valuation(s, p);
        lp.nu_one_minus_s = valuation(one_minus, p);
        if (lp.nu_s < 0) {
            lp.type = LocalType::SteinbergU7;
        } else if (lp.nu_one_minus_s > 0) {
            lp.type = LocalType::U3U2U2;
        }
        out.primes.push_back(lp);
    }
    const mpq_class shift = s - 1;
    out.a = shift.get_num();
    out.b = shift.get_den();
    out.hypothesis_shape = has_odd_prime(out.a) && has_odd_prime(out.b);
    out.steinberg_frobenius_exponents = {0, 1, 2, 3, 4, 5, 6};
    return out;
}

}  // namespace g2rigid
