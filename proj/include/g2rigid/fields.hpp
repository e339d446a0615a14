#pragma once

#include <cstdint>
#include <string>

#include <gmpxx.h>

#include "g2rigid/error.hpp"

namespace g2rigid {

bool is_prime(std::uint64_t n);

/// Q with GMP rationals. Values are kept canonical (lowest terms, positive
/// denominator) by mpq_class.
struct RationalField {
    using Element = mpq_class;

    Element zero() const { return Element(0); }
    Element one() const { return Element(1); }
    Element from_int(long v) const { return Element(v); }

    Element add(const Element& a, const Element& b) const { return a + b; }
    Element sub(const Element& a, const Element& b) const { return a - b; }
    Element mul(const Element& a, const Element& b) const { return a * b; }
    Element neg(const Element& a) const { return -a; }
    Element inv(const Element& a) const;
    Element div(const Element& a, const Element& b) const { return mul(a, inv(b)); }

    bool is_zero(const Element& a) const { return sgn(a) == 0; }
    bool equal(const Element& a, const Element& b) const { return a == b; }
    std::string format(const Element& a) const { return a.get_str(); }

    bool operator==(const RationalField&) const = default;
};

/// F_p for an odd prime p < 2^62. Elements are canonical residues in [0, p).
class PrimeField {
public:
    using Element = std::uint64_t;

    /// Throws InvalidCharacteristic unless p is an odd prime.
    explicit PrimeField(std::uint64_t p);

    std::uint64_t characteristic() const { return p_; }
    std::uint64_t size() const { return p_; }

    Element zero() const { return 0; }
    Element one() const { return 1; }
    Element from_int(long v) const {
        long r = v % static_cast<long>(p_);
        return static_cast<Element>(r < 0 ? r + static_cast<long>(p_) : r);
    }
    /// Throws DenominatorClash when p divides the denominator.
    Element from_rational(const mpq_class& v) const;

    Element add(Element a, Element b) const {
        Element s = a + b;
        return s >= p_ ? s - p_ : s;
    }
    Element sub(Element a, Element b) const { return a >= b ? a - b : a + p_ - b; }
    Element mul(Element a, Element b) const {
        return static_cast<Element>((static_cast<unsigned __int128>(a) * b) % p_);
    }
    Element neg(Element a) const { return a == 0 ? 0 : p_ - a; }
    Element pow(Element a, std::uint64_t e) const;
    Element inv(Element a) const;
    Element div(Element a, Element b) const { return mul(a, inv(b)); }

    bool is_zero(Element a) const { return a == 0; }
    bool equal(Element a, Element b) const { return a == b; }
    std::string format(Element a) const { return std::to_string(a); }

    /// Symmetric lift to (-p/2, p/2].
    long lift(Element a) const {
        return a > p_ / 2 ? static_cast<long>(a) - static_cast<long>(p_) : static_cast<long>(a);
    }

    bool operator==(const PrimeField&) const = default;

private:
    std::uint64_t p_;
};

}  // namespace g2rigid
