#include "g2rigid/g2_forms.hpp"

#include <map>

namespace g2rigid {

std::string to_string(Symmetry s) {
    switch (s) {
        case Symmetry::None: return "none";
        case Symmetry::Symmetric: return "symmetric";
        case Symmetry::Alternating: return "alternating";
    }
    return "?";
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Generates: return "Generates";
        case Verdict::Inconclusive: return "Inconclusive";
        case Verdict::Fails: return "Fails";
    }
    return "?";
}

Reduction reduce_mod(const QTuple& t, std::uint64_t ell) {
    if (ell == 2) throw Error(ErrorKind::InvalidCharacteristic, "reduction mod 2 is excluded");
    const PrimeField fp(ell);
    std::vector<FpMatrix> finite;
    for (const auto& a : t.finite()) finite.push_back(reduce(a, fp));

    Reduction out{FpTuple(std::move(finite)), false, {}, {}, false, {}};
    // A_inf is derived over F_ell; it must agree with the reduction of the
    // rational A_inf (which also checks that its denominators are prime to ell).
    out.product_relation = out.tuple.product_relation_holds() && reduce(t.infinity(), fp) == out.tuple.infinity();

    const auto mats_q = t.all();
    const auto mats_p = out.tuple.all();
    out.profile_preserved = true;
    for (std::size_t i = 0; i < mats_q.size(); ++i) {
        const auto roots = rational_roots(charpoly(mats_q[i]));
        auto point_q = jordan_profile(mats_q[i], roots);
        std::map<std::uint64_t, Partition> expected;
        std::vector<std::uint64_t> cand;
        for (const auto& [mu, part] : point_q) {
            const auto m = fp.from_rational(mu);
            if (expected.count(m)) {
                out.profile_preserved = false;
                out.mismatches.push_back("point " + std::to_string(i) + ": eigenvalues collide mod " + std::to_string(ell));
            }
            expected.emplace(m, part);
            cand.push_back(m);
        }
        auto point_p = jordan_profile(mats_p[i], cand);
        for (const auto& [mu, part] : point_p) {
            const auto it = expected.find(mu);
            if (it != expected.end() && it->second == part) continue;
            out.profile_preserved = false;
            out.mismatches.push_back("point " + std::to_string(i) + ": eigenvalue " + fp.format(mu) + " has Jordan type " +
                                     part.format() + " mod " + std::to_string(ell) +
                                     (it == expected.end() ? "" : ", expected " + it->second.format()));
        }
        out.profile_q.push_back(std::move(point_q));
        out.profile_mod.push_back(std::move(point_p));
    }
    return out;
}

GenerationReport generation_certificate(const FpTuple& t) {
    const PrimeField& fp = t.field();
    GenerationReport r;
    r.ell = fp.characteristic();
    r.ell_gt_5 = r.ell > 5;
    if (t.rank() != 7) {
        r.reasons.push_back("rank " + std::to_string(t.rank()) + " is not 7");
        return r;
    }
    const std::uint64_t minus = fp.neg(fp.one());
    const std::vector<std::uint64_t> cand{minus, fp.one()};
    const auto datum = local_datum(t, cand);
    r.profile = format_datum(fp, datum);

    const LocalDatum<PrimeField> target{{{minus, Partition({1, 1, 1, 1})}, {fp.one(), Partition({1, 1, 1})}},
                                        {{fp.one(), Partition({3, 2, 2})}},
                                        {{fp.one(), Partition({7})}}};
    r.profile_ok = datum == target;
    r.product_relation = t.product_relation_holds();
    r.enveloping_dim = enveloping_dim(t.all());
    r.form_dim2 = invariant_form_space(t, 2).dimension;
    r.form_dim3 = invariant_form_space(t, 3).dimension;

    bool hard_fail = false;
    if (!r.profile_ok) {
        hard_fail = true;
        r.reasons.push_back("Jordan profile " + r.profile + " differs from (-1)^4 1^3 | 1:[3,2,2] | 1:[7]");
    }
    if (!r.product_relation) {
        hard_fail = true;
        r.reasons.push_back("product relation fails");
    }
    if (r.enveloping_dim != 49) {
        hard_fail = true;
        r.reasons.push_back("enveloping algebra has dimension " + std::to_string(r.enveloping_dim) + " < 49");
    }
    if (r.form_dim2 == 0) {
        hard_fail = true;
        r.reasons.push_back("no invariant bilinear form");
    }
    if (r.form_dim3 == 0) {
        hard_fail = true;
        r.reasons.push_back("no invariant alternating trilinear form");
    }
    if (!r.ell_gt_5) r.reasons.push_back("generation criterion requires ell > 5");
    r.verdict = hard_fail ? Verdict::Fails : r.ell_gt_5 ? Verdict::Generates : Verdict::Inconclusive;
    return r;
}

std::vector<std::uint64_t> scalar_stabilizers(const FpForm& c) {
    const PrimeField& fp = c.field;
    if (fp.characteristic() > 100000) throw Error(ErrorKind::TooLarge, "scalar scan limited to p <= 100000");
    std::vector<std::uint64_t> out;
    for (std::uint64_t z = 1; z < fp.characteristic(); ++z) {
        FpMatrix m = FpMatrix::identity(fp, c.n).scaled(z);
        if (stabilizes(m, {c})) out.push_back(z);
    }
    return out;
}

}  // namespace g2rigid
