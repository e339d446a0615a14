#include "g2rigid/ext_field.hpp"

#include "g2rigid/fields.hpp"

namespace g2rigid {

namespace {

using Poly = std::vector<std::uint32_t>;

void trim(Poly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

// Remainder of a modulo monic b over F_p.
Poly poly_mod(Poly a, const Poly& b, std::uint32_t p) {
    trim(a);
    const std::size_t db = b.size() - 1;
    while (a.size() > db) {
        const std::uint64_t lead = a.back();
        const std::size_t shift = a.size() - 1 - db;
        for (std::size_t i = 0; i <= db; ++i) a[shift + i] = static_cast<std::uint32_t>((a[shift + i] + p - (lead * b[i]) % p) % p);
        trim(a);
    }
    return a;
}

Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& m, std::uint32_t p) {
    if (a.empty() || b.empty()) return {};
    Poly c(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            c[i + j] = static_cast<std::uint32_t>((c[i + j] + static_cast<std::uint64_t>(a[i]) * b[j]) % p);
    return poly_mod(std::move(c), m, p);
}

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
    std::vector<std::uint64_t> f;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d != 0) continue;
        f.push_back(d);
        while (n % d == 0) n /= d;
    }
    if (n > 1) f.push_back(n);
    return f;
}

}  // namespace

bool is_irreducible_mod_p(const std::vector<std::uint32_t>& poly, std::uint32_t p) {
    Poly f = poly;
    trim(f);
    const int deg = static_cast<int>(f.size()) - 1;
    if (deg < 1) return false;
    for (int d = 1; 2 * d <= deg; ++d) {
        std::uint64_t count = 1;
        for (int i = 0; i < d; ++i) count *= p;
        for (std::uint64_t code = 0; code < count; ++code) {
            Poly g(static_cast<std::size_t>(d) + 1, 0);
            std::uint64_t c = code;
            for (int i = 0; i < d; ++i) {
                g[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(c % p);
                c /= p;
            }
            g[static_cast<std::size_t>(d)] = 1;
            if (poly_mod(f, g, p).empty()) return false;
        }
    }
    return true;
}

ExtField ExtField::create(std::uint64_t p, int k, int modulus_index) {
    if (p == 2 || !is_prime(p) || p > 65521) {
        throw Error(ErrorKind::InvalidCharacteristic, "extension fields need an odd prime, got " + std::to_string(p));
    }
    if (k < 1) throw Error(ErrorKind::InvalidCharacteristic, "degree must be >= 1");
    std::uint64_t q = 1;
    for (int i = 0; i < k; ++i) {
        q *= p;
        if (q > (1ULL << 24)) throw Error(ErrorKind::TooLarge, "field size above 2^24");
    }

    ExtField f;
    f.p_ = static_cast<std::uint32_t>(p);
    f.k_ = k;
    f.q_ = static_cast<std::uint32_t>(q);

    // Enumerate monic degree-k polynomials with (a_{k-1}, ..., a_0) in
    // lexicographic order: the code's most significant digit is a_{k-1}.
    int found = -1;
    for (std::uint64_t code = 0; code < q; ++code) {
        Poly m(static_cast<std::size_t>(k) + 1, 0);
        std::uint64_t c = code;
        for (int i = 0; i < k; ++i) {
            m[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(c % p);
            c /= p;
        }
        m[static_cast<std::size_t>(k)] = 1;
        if (!is_irreducible_mod_p(m, f.p_)) continue;
        if (++found == modulus_index) {
            f.modulus_ = std::move(m);
            break;
        }
    }
    if (f.modulus_.empty()) throw Error(ErrorKind::TooLarge, "not enough irreducible polynomials of that degree");
    f.build_tables();
    return f;
}

void ExtField::build_tables() {
    const std::uint32_t p = p_;
    int lo_digits = (k_ + 1) / 2;
    split_ = 1;
    for (int i = 0; i < lo_digits; ++i) split_ *= p;
    hi_size_ = q_ / split_;

    auto digitwise = [p](std::uint32_t a, std::uint32_t b, std::uint32_t size) {
        std::uint32_t r = 0;
        std::uint32_t place = 1;
        for (std::uint32_t s = size; s > 1; s /= p) {
            r += place * (((a % p) + (b % p)) % p);
            a /= p;
            b /= p;
            place *= p;
        }
        return r;
    };
    lo_add_.resize(static_cast<std::size_t>(split_) * split_);
    for (std::uint32_t a = 0; a < split_; ++a)
        for (std::uint32_t b = 0; b < split_; ++b) lo_add_[a * split_ + b] = digitwise(a, b, split_);
    hi_add_.resize(static_cast<std::size_t>(hi_size_) * hi_size_);
    for (std::uint32_t a = 0; a < hi_size_; ++a)
        for (std::uint32_t b = 0; b < hi_size_; ++b) hi_add_[a * hi_size_ + b] = digitwise(a, b, hi_size_);

    neg_.resize(q_);
    for (std::uint32_t a = 0; a < q_; ++a) {
        auto d = digits(a);
        for (auto& x : d) x = (p - x) % p;
        neg_[a] = from_digits(d);
    }

    // Find a primitive element by testing orders, smallest code first.
    const std::uint64_t order = q_ - 1;
    const auto factors = prime_factors(order);
    auto slow_pow = [&](const Poly& base, std::uint64_t e) {
        Poly result{1};
        Poly b = base;
        while (e != 0) {
            if (e & 1U) result = poly_mulmod(result, b, modulus_, p);
            b = poly_mulmod(b, b, modulus_, p);
            e >>= 1U;
        }
        return result;
    };
    auto to_poly = [&](std::uint32_t code) {
        Poly r = digits(code);
        trim(r);
        return r;
    };
    std::uint32_t gen = 0;
    for (std::uint32_t cand = 2; cand < q_ + 1 && gen == 0; ++cand) {
        if (cand >= q_) break;
        Poly g = to_poly(cand);
        bool primitive = true;
        for (auto r : factors) {
            Poly t = slow_pow(g, order / r);
            if (t.size() == 1 && t[0] == 1) {
                primitive = false;
                break;
            }
        }
        if (primitive) gen = cand;
    }
    if (gen == 0) throw Error(ErrorKind::InvalidCharacteristic, "no primitive element found");

    exp_.assign(order, 0);
    log_.assign(q_, 0);
    Poly g = to_poly(gen);
    Poly cur{1};
    for (std::uint64_t e = 0; e < order; ++e) {
        Poly padded = cur;
        padded.resize(static_cast<std::size_t>(k_), 0);
        const std::uint32_t code = from_digits(padded);
        exp_[e] = code;
        log_[code] = static_cast<std::uint32_t>(e);
        cur = poly_mulmod(cur, g, modulus_, p);
    }
    chi_.assign(q_, 0);
    for (std::uint32_t a = 1; a < q_; ++a) chi_[a] = (log_[a] % 2 == 0) ? 1 : -1;
}

ExtField::Element ExtField::from_int(long v) const {
    long r = v % static_cast<long>(p_);
    if (r < 0) r += p_;
    return static_cast<Element>(r);
}

ExtField::Element ExtField::inv(Element a) const {
    if (a == 0) throw Error(ErrorKind::InvalidScalar, "inverse of zero");
    return exp_[(q_ - 1 - log_[a]) % (q_ - 1)];
}

ExtField::Element ExtField::pow(Element a, std::uint64_t e) const {
    if (e == 0) return 1;
    if (a == 0) return 0;
    return exp_[static_cast<std::uint32_t>((static_cast<std::uint64_t>(log_[a]) * (e % (q_ - 1))) % (q_ - 1))];
}

std::vector<std::uint32_t> ExtField::digits(Element a) const {
    std::vector<std::uint32_t> d(static_cast<std::size_t>(k_), 0);
    for (int i = 0; i < k_; ++i) {
        d[static_cast<std::size_t>(i)] = a % p_;
        a /= p_;
    }
    return d;
}

ExtField::Element ExtField::from_digits(const std::vector<std::uint32_t>& d) const {
    Element r = 0;
    for (std::size_t i = d.size(); i-- > 0;) r = r * p_ + d[i];
    return r;
}

std::string ExtField::format(Element a) const {
    if (k_ == 1) return std::to_string(a);
    std::string s;
    auto d = digits(a);
    for (std::size_t i = d.size(); i-- > 0;) {
        if (d[i] == 0) continue;
        if (!s.empty()) s += "+";
        if (i == 0 || d[i] != 1) s += std::to_string(d[i]);
        if (i > 0) s += i == 1 ? "T" : "T^" + std::to_string(i);
    }
    return s.empty() ? "0" : s;
}

std::string ExtField::modulus_string() const {
    std::string s;
    for (std::size_t i = modulus_.size(); i-- > 0;) {
        if (modulus_[i] == 0) continue;
        if (!s.empty()) s += "+";
        if (i == 0 || modulus_[i] != 1) s += std::to_string(modulus_[i]);
        if (i > 0) s += i == 1 ? "T" : "T^" + std::to_string(i);
    }
    return s;
}

}  // namespace g2rigid
