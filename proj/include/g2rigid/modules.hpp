#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "g2rigid/linalg.hpp"

namespace g2rigid {

/// A module over F_p given by the action of generators on column vectors.
struct Module {
    PrimeField field;
    std::size_t dim = 0;
    std::vector<FpMatrix> gens;

    Module(PrimeField f, std::size_t d, std::vector<FpMatrix> g) : field(std::move(f)), dim(d), gens(std::move(g)) {}
    explicit Module(std::vector<FpMatrix> g) : field(g.at(0).field()), dim(g.at(0).rows()), gens(std::move(g)) {}
};

/// Incrementally built semi-echelon basis over F_p: each stored row has a
/// leading 1 at its pivot and zeros at the pivots of earlier rows.
class RowEchelon {
public:
    RowEchelon(PrimeField f, std::size_t cols) : f_(std::move(f)), cols_(cols) {}

    std::vector<std::uint64_t> reduce(std::vector<std::uint64_t> v) const;
    /// false when v is already in the span
    bool insert(const std::vector<std::uint64_t>& v);
    std::size_t size() const { return rows_.size(); }
    FpMatrix matrix() const;

private:
    PrimeField f_;
    std::size_t cols_;
    std::vector<std::vector<std::uint64_t>> rows_;
    std::vector<std::size_t> pivots_;
};

/// Conjugation X -> g X g^{-1} on n x n matrices, coordinates row-major.
FpMatrix adjoint_action(const FpMatrix& g);

/// Basis (as rows of n^2 coordinates) of the trace-zero matrices:
/// E_ij for i != j, then E_ii - E_nn.
FpMatrix traceless_basis(const PrimeField& f, std::size_t n);

/// Smallest submodule containing the given vectors (rows), as a
/// semi-echelon basis.
FpMatrix spin(const Module& m, const FpMatrix& seeds);

/// Coordinates of the vectors (rows of v) in the basis given by the rows of
/// b; DimensionMismatch if some vector lies outside the span.
FpMatrix coordinates(const FpMatrix& b, const FpMatrix& v);

/// Action on a submodule with basis rows `sub`, and on the quotient by it.
Module submodule(const Module& m, const FpMatrix& sub);
Module quotient(const Module& m, const FpMatrix& sub);

/// The submodule of m whose vectors are annihilated by a submodule of the
/// dual (given by rows, acted on by transposes).
FpMatrix annihilator(const FpMatrix& dual_sub);

/// Linear combination of words in the generators; word {i, j} means g_i g_j.
struct AlgebraElement {
    std::vector<std::pair<std::uint64_t, std::vector<std::size_t>>> terms;
    FpMatrix evaluate(const Module& m) const;
};

/// Irreducible module with a Norton certificate: x - alpha has a
/// one-dimensional kernel spanned by v0, v0 spins to the whole module, and
/// the dual kernel vector spins to the whole dual. This also proves absolute
/// irreducibility. `tree` and `structure` record the spin of v0: basis vector
/// i > 0 is g_{tree[i].second} applied to basis vector tree[i].first, and
/// structure[s] holds in column i the coordinates of g_s b_i.
struct IrreducibleModule {
    Module module;
    AlgebraElement x;
    std::uint64_t alpha = 0;
    std::vector<std::uint64_t> v0;
    std::vector<std::pair<std::size_t, std::size_t>> tree;
    std::vector<FpMatrix> structure;
};

struct SplitResult {
    FpMatrix submodule;                          // proper, nonzero; empty when irreducible
    std::optional<IrreducibleModule> certificate;
};

/// Deterministic for a given seed; DegenerateInput when no split or proof is
/// found within the attempts.
SplitResult meataxe_split(const Module& m, std::uint64_t seed = 1, int attempts = 400);

/// Composition factors in depth-first order (submodule before quotient).
std::vector<IrreducibleModule> composition_factors(const Module& m, std::uint64_t seed = 1);

/// dim Hom_G(S, M) through the kernel of x - alpha on M.
std::size_t hom_dim(const IrreducibleModule& s, const Module& m);

/// Brute-force dim Hom_G(a, b): X with X a(g) = b(g) X for every generator.
std::size_t hom_dim_dense(const Module& a, const Module& b);

/// Roots in F_p by exhaustive evaluation; TooLarge for p >= 2^20.
std::vector<std::uint64_t> roots_in_prime_field(const Polynomial<PrimeField>& p);

}  // namespace g2rigid
