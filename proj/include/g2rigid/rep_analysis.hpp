#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "g2rigid/finite_group.hpp"
#include "g2rigid/modules.hpp"

namespace g2rigid {

/// One irreducible constituent. For the ordinary method `character` holds
/// chi(class representative) mod p for every class and `component` a basis of
/// the isotypic component; the modular method leaves both empty.
struct Constituent {
    std::size_t dimension = 0;
    std::size_t multiplicity = 0;
    std::vector<std::uint64_t> character;
    std::optional<FpMatrix> component;
};

struct DecompositionReport {
    std::string method;  // "ordinary" or "modular"
    std::size_t module_dim = 0;
    std::vector<Constituent> constituents;
    bool semisimple = true;

    /// dimension -> total number of copies of constituents of that dimension
    std::map<std::size_t, std::size_t> multiset() const;
};

/// Ordinary case (p does not divide |G|): isotypic components are the joint
/// eigenspaces of the class sums acting on the module; chi(1) comes from
/// chi(1)^2 = |G| / sum_j w_j w_j* / |C_j|, multiplicities from the component
/// dimensions and are cross-checked by the character inner product.
/// `images` lists the module matrix of every group element in group order.
/// Throws NotOrdinary when p divides |G|.
DecompositionReport decompose_ordinary(const FiniteMatrixGroup& g, const ClassData& classes,
                                       const std::vector<FpMatrix>& images);

/// Any characteristic: composition factors with Norton certificates, grouped
/// by isomorphism; semisimple iff sum dim Hom(S, M) dim S = dim M.
DecompositionReport decompose_modular(const Module& m);

/// Decomposition of End(V) under conjugation. Ordinary when p does not
/// divide |G|, modular otherwise.
DecompositionReport adjoint_decomposition(const FiniteMatrixGroup& g);
DecompositionReport adjoint_decomposition_ordinary(const FiniteMatrixGroup& g);

/// Module of conjugation on End(V) (or on trace-zero matrices) for the
/// group generators.
Module adjoint_module(const std::vector<FpMatrix>& gens);
Module adjoint0_module(const std::vector<FpMatrix>& gens);

struct ViiiWitness {
    std::size_t constituent = 0;  // index into the adjoint decomposition
    std::size_t element = 0;      // group element index of h
    std::uint64_t alpha = 0;
    bool found = false;
};

struct BignessReport {
    std::size_t h0_ad0 = 0;
    std::size_t h0_ad0_all_elements = 0;
    std::size_t h1_ad0 = 0;
    std::size_t idempotent_span = 0;       // rank of the e_{h,alpha} in End(V)
    std::size_t viii_obstruction_dim = 0;  // largest submodule killed by all pairings
    DecompositionReport adjoint;
    std::vector<ViiiWitness> witnesses;    // one per constituent of End(V)
    bool condition_viii = false;
    bool big = false;
    std::vector<std::string> reasons;
};

/// Conditions (vii) and (viii) for the materialized group. H^1(ad0) from
/// cocycles determined by their generator values and propagated along the
/// Cayley graph. For (viii), an irreducible W in End(V) has no witness
/// exactly when tr(e_{h,alpha} X) = 0 for all X in W and all rank-one
/// idempotents onto one-dimensional generalized eigenspaces, so (viii) holds
/// iff the largest submodule inside that common kernel is zero. A witness
/// (h, alpha) is also searched per isotypic constituent. TooLarge when the
/// cocycle system exceeds the work bound.
BignessReport bigness_check(const FiniteMatrixGroup& g);

/// Largest G-submodule contained in the span of the rows of u.
FpMatrix largest_submodule_in(const Module& m, const FpMatrix& u);

/// dim H^1(G, M) for a module given by the images of the group generators.
std::size_t h1_dim(const FiniteMatrixGroup& g, const Module& m);

/// dim of the fixed space of M under the generators.
std::size_t h0_dim(const Module& m);

}  // namespace g2rigid
