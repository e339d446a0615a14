#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "g2rigid/tuple.hpp"

namespace g2rigid {

/// One construction step: a scalar twist (one scalar per finite point) or a
/// middle convolution.
struct RecipeStep {
    enum class Kind { Twist, Convolution };
    Kind kind = Kind::Twist;
    std::vector<mpq_class> scalars;  // Twist
    mpq_class lambda;                // Convolution

    static RecipeStep twist(std::vector<mpq_class> c) { return {Kind::Twist, std::move(c), 0}; }
    static RecipeStep convolution(mpq_class l) { return {Kind::Convolution, {}, std::move(l)}; }

    friend bool operator==(const RecipeStep&, const RecipeStep&) = default;
};

/// Replayable construction sequence, applied to the trivial rank-1 tuple
/// ((1), (1)) on two finite points.
struct Recipe {
    std::vector<RecipeStep> steps;

    /// One step per line: "twist c1 c2" or "mc lambda".
    std::string to_text() const;
    static Recipe parse(const std::string& text);

    friend bool operator==(const Recipe&, const Recipe&) = default;
};

QTuple seed_tuple();

struct Realization {
    QTuple tuple;
    mpz_class denominator;           // radical of the lcm of entry denominators
    std::vector<std::size_t> ranks;  // rank after each step
};

Realization realize(const Recipe& recipe);

/// Product of the primes dividing some entry denominator of A_1..A_r, A_inf.
mpz_class tuple_denominator(const QTuple& t);

using QLocalDatum = LocalDatum<RationalField>;

/// Jordan data at eigenvalues +1 and -1.
QLocalDatum signed_unit_datum(const QTuple& t);

/// Involution (-1)^4 1^3 at 0, unipotent [3,2,2] at 1, unipotent [7] at infinity.
QLocalDatum g2_target_datum();

struct SearchBounds {
    int max_convolutions = 8;
    std::size_t max_rank = 7;
    std::size_t target_rank = 7;
};

struct SearchResult {
    Recipe recipe;
    std::size_t nodes_expanded = 0;
    int depth = 0;
};

/// Breadth-first search over alternating {+-1}-twists and MC_{-1}, starting
/// from the trivial rank-1 tuple. Returns the first recipe, in level order
/// and then lexicographic twist order, whose realization has the target
/// rank and local datum. Throws RecipeNotFound when the bounds run out.
SearchResult search_recipe(const QLocalDatum& target, const SearchBounds& bounds);

}  // namespace g2rigid
