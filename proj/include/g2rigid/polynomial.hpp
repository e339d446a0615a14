#pragma once

#include <string>
#include <vector>

#include "g2rigid/matrix.hpp"

namespace g2rigid {

/// Dense univariate polynomial, coefficients stored low degree first. The
/// zero polynomial has an empty coefficient list.
template <class F>
class Polynomial {
public:
    using Element = typename F::Element;

    explicit Polynomial(F field) : field_(std::move(field)) {}
    Polynomial(F field, std::vector<Element> coeffs) : field_(std::move(field)), coeffs_(std::move(coeffs)) { trim(); }

    static Polynomial from_ints(const F& field, std::initializer_list<long> low_first) {
        std::vector<Element> c;
        for (long v : low_first) c.push_back(field.from_int(v));
        return Polynomial(field, std::move(c));
    }

    /// (x - a)^k
    static Polynomial linear_power(const F& field, const Element& a, int k) {
        Polynomial result(field, {field.one()});
        Polynomial lin(field, {field.neg(a), field.one()});
        for (int i = 0; i < k; ++i) result = result * lin;
        return result;
    }

    const F& field() const { return field_; }
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const { return coeffs_.empty(); }
    const std::vector<Element>& coeffs() const { return coeffs_; }
    Element coeff(std::size_t i) const { return i < coeffs_.size() ? coeffs_[i] : field_.zero(); }

    Element evaluate(const Element& x) const {
        Element acc = field_.zero();
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = field_.add(field_.mul(acc, x), *it);
        return acc;
    }

    Matrix<F> evaluate(const Matrix<F>& m) const {
        Matrix<F> acc(field_, m.rows(), m.cols());
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
            acc = acc * m;
            for (std::size_t i = 0; i < m.rows(); ++i) acc(i, i) = field_.add(acc(i, i), *it);
        }
        return acc;
    }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        if (a.is_zero() || b.is_zero()) return Polynomial(a.field_);
        const F& f = a.field_;
        std::vector<Element> c(a.coeffs_.size() + b.coeffs_.size() - 1, f.zero());
        for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
            for (std::size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] = f.add(c[i + j], f.mul(a.coeffs_[i], b.coeffs_[j]));
        return Polynomial(f, std::move(c));
    }

    friend bool operator==(const Polynomial& a, const Polynomial& b) {
        if (a.coeffs_.size() != b.coeffs_.size()) return false;
        for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
            if (!a.field_.equal(a.coeffs_[i], b.coeffs_[i])) return false;
        return true;
    }

    std::string format() const {
        if (is_zero()) return "0";
        std::string s;
        for (int i = degree(); i >= 0; --i) {
            const Element& c = coeffs_[static_cast<std::size_t>(i)];
            if (field_.is_zero(c)) continue;
            if (!s.empty()) s += " + ";
            s += "(" + field_.format(c) + ")";
            if (i > 0) s += "*T^" + std::to_string(i);
        }
        return s;
    }

private:
    void trim() {
        while (!coeffs_.empty() && field_.is_zero(coeffs_.back())) coeffs_.pop_back();
    }

    F field_;
    std::vector<Element> coeffs_;
};

}  // namespace g2rigid
