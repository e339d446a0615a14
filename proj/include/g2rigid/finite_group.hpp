#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "g2rigid/matrix.hpp"

namespace g2rigid {

/// Matrix group over F_p materialized by breadth-first closure from its
/// generators. Element 0 is the identity; order is deterministic.
class FiniteMatrixGroup {
public:
    static constexpr std::size_t default_bound = 100000;

    FiniteMatrixGroup(std::vector<FpMatrix> generators, std::size_t bound = default_bound);

    const PrimeField& field() const { return field_; }
    std::size_t dimension() const { return dim_; }
    std::size_t order() const { return elements_.size(); }
    const std::vector<FpMatrix>& generators() const { return gens_; }
    const std::vector<FpMatrix>& elements() const { return elements_; }
    const FpMatrix& element(std::size_t i) const { return elements_[i]; }

    /// Index of a group element; throws DimensionMismatch when absent.
    std::size_t index_of(const FpMatrix& m) const;
    bool contains(const FpMatrix& m) const;

    /// index of element(i) * generator(s)
    std::size_t times_generator(std::size_t i, std::size_t s) const { return right_[i * gens_.size() + s]; }
    /// BFS tree: element i = element(parent(i)) * generator(via(i)), i > 0.
    std::size_t parent(std::size_t i) const { return parent_[i]; }
    std::size_t via(std::size_t i) const { return via_[i]; }

    std::size_t inverse_index(std::size_t i) const { return inverse_[i]; }
    std::size_t product_index(std::size_t i, std::size_t j) const;
    std::size_t element_order(std::size_t i) const;

private:
    struct KeyHash {
        std::size_t operator()(const std::vector<std::uint64_t>& v) const;
    };

    PrimeField field_;
    std::size_t dim_ = 0;
    std::vector<FpMatrix> gens_;
    std::vector<FpMatrix> elements_;
    std::unordered_map<std::vector<std::uint64_t>, std::size_t, KeyHash> index_;
    std::vector<std::size_t> right_;
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> via_;
    std::vector<std::size_t> inverse_;
};

struct ConjugacyClass {
    std::size_t representative = 0;  // smallest element index in the class
    std::vector<std::size_t> members;
    std::size_t inverse_class = 0;   // class of representative^{-1}
    std::size_t element_order = 0;
};

struct ClassData {
    std::vector<ConjugacyClass> classes;  // ordered by representative
    std::vector<std::size_t> class_of;    // element index -> class index
};

/// Orbits of the conjugation action of the generators.
ClassData conjugacy_classes(const FiniteMatrixGroup& g);

/// The monomial group F_8 . F_8^* of order 56 acting on the seven nontrivial
/// additive characters of F_8 (basis e_a, a = g^0..g^6 for a root g of
/// T^3 + T + 1): translations act diagonally by (-1)^Tr(a b), multiplication
/// by c sends e_a to e_{a/c}.
FiniteMatrixGroup build_h56(std::uint64_t ell);

/// Generators of SL_2(F_ell) acting on binary forms of degree m:
/// u = [[1, 1], [0, 1]] and w = [[0, -1], [1, 0]], a matrix [[a, b], [c, d]]
/// acting by f(x, y) -> f(a x + c y, b x + d y) in the basis x^{m-i} y^i.
std::vector<FpMatrix> sym_power_rep(std::uint64_t ell, unsigned m);

/// Image of a 2x2 matrix on degree-m binary forms.
FpMatrix sym_power(const FpMatrix& g, unsigned m);

}  // namespace g2rigid
