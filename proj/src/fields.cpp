#include "g2rigid/fields.hpp"

namespace g2rigid {

namespace {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    a %= m;
    while (e != 0) {
        if (e & 1U) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1U;
    }
    return r;
}

}  // namespace

// Deterministic Miller-Rabin for 64-bit inputs.
bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t small : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % small == 0) return n == small;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1U) == 0) {
        d >>= 1U;
        ++s;
    }
    for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        std::uint64_t x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

RationalField::Element RationalField::inv(const Element& a) const {
    if (is_zero(a)) throw Error(ErrorKind::InvalidScalar, "division by zero in Q");
    Element r;
    mpq_inv(r.get_mpq_t(), a.get_mpq_t());
    return r;
}

PrimeField::PrimeField(std::uint64_t p) : p_(p) {
    if (p == 2 || p >= (1ULL << 62) || !is_prime(p)) {
        throw Error(ErrorKind::InvalidCharacteristic, "expected an odd prime, got " + std::to_string(p));
    }
}

PrimeField::Element PrimeField::from_rational(const mpq_class& v) const {
    mpz_class pz(static_cast<unsigned long>(p_));
    mpz_class num = v.get_num() % pz;
    mpz_class den = v.get_den() % pz;
    if (num < 0) num += pz;
    if (den == 0) {
        throw Error(ErrorKind::DenominatorClash, std::to_string(p_) + " divides denominator " + v.get_den().get_str());
    }
    return div(num.get_ui(), den.get_ui());
}

PrimeField::Element PrimeField::pow(Element a, std::uint64_t e) const { return powmod(a, e, p_); }

PrimeField::Element PrimeField::inv(Element a) const {
    if (a == 0) throw Error(ErrorKind::InvalidScalar, "division by zero in F_" + std::to_string(p_));
    return powmod(a, p_ - 2, p_);
}

}  // namespace g2rigid
