#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "g2rigid/error.hpp"

namespace g2rigid {

/// F_q with q = p^k, elements encoded as integers in [0, q) whose base-p
/// digits are the coefficients (low degree first) of the residue modulo the
/// defining polynomial. Addition is digitwise; multiplication goes through
/// discrete-log tables.
class ExtField {
public:
    using Element = std::uint32_t;

    /// Builds F_{p^k} with the `modulus_index`-th monic irreducible of degree k
    /// in lexicographic order (coefficients compared from T^{k-1} down to T^0).
    /// Index 0 is the canonical choice.
    static ExtField create(std::uint64_t p, int k, int modulus_index = 0);

    std::uint32_t characteristic() const { return p_; }
    int degree() const { return k_; }
    std::uint32_t size() const { return q_; }
    /// Monic modulus, low degree first (length k+1).
    const std::vector<std::uint32_t>& modulus() const { return modulus_; }
    std::string modulus_string() const;

    Element zero() const { return 0; }
    Element one() const { return 1; }
    Element from_int(long v) const;
    /// Primitive element used for the log tables.
    Element generator() const { return exp_[1]; }

    Element add(Element a, Element b) const {
        return lo_add_[(a % split_) * split_ + b % split_] + split_ * hi_add_[(a / split_) * hi_size_ + b / split_];
    }
    Element neg(Element a) const { return neg_[a]; }
    Element sub(Element a, Element b) const { return add(a, neg_[b]); }
    Element mul(Element a, Element b) const {
        if (a == 0 || b == 0) return 0;
        std::uint32_t e = log_[a] + log_[b];
        if (e >= q_ - 1) e -= q_ - 1;
        return exp_[e];
    }
    Element inv(Element a) const;
    Element pow(Element a, std::uint64_t e) const;
    std::uint32_t log(Element a) const { return log_[a]; }
    Element exp(std::uint32_t e) const { return exp_[e % (q_ - 1)]; }

    /// Quadratic character with chi(0) = 0.
    int chi(Element a) const { return chi_[a]; }
    const std::vector<std::int8_t>& chi_table() const { return chi_; }

    /// Frobenius x -> x^p.
    Element frobenius(Element a) const { return pow(a, p_); }

    std::vector<std::uint32_t> digits(Element a) const;
    Element from_digits(const std::vector<std::uint32_t>& d) const;
    std::string format(Element a) const;

    bool is_zero(Element a) const { return a == 0; }
    bool equal(Element a, Element b) const { return a == b; }

private:
    ExtField() = default;
    void build_tables();

    std::uint32_t p_ = 0;
    int k_ = 0;
    std::uint32_t q_ = 0;
    std::uint32_t split_ = 1;
    std::uint32_t hi_size_ = 1;
    std::vector<std::uint32_t> modulus_;
    std::vector<std::uint32_t> lo_add_;
    std::vector<std::uint32_t> hi_add_;
    std::vector<Element> neg_;
    std::vector<Element> exp_;
    std::vector<std::uint32_t> log_;
    std::vector<std::int8_t> chi_;
};

/// Monic irreducibility over F_p by trial division against every monic
/// polynomial of degree <= deg/2. Coefficients low degree first.
bool is_irreducible_mod_p(const std::vector<std::uint32_t>& poly, std::uint32_t p);

}  // namespace g2rigid
