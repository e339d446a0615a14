#include "g2rigid/rep_analysis.hpp"

#include <algorithm>

namespace g2rigid {

std::map<std::size_t, std::size_t> DecompositionReport::multiset() const {
    std::map<std::size_t, std::size_t> out;
    for (const auto& c : constituents) out[c.dimension] += c.multiplicity;
    return out;
}

namespace {

FpMatrix stack_rows(const PrimeField& f, const std::vector<FpMatrix>& parts, std::size_t cols) {
    std::size_t total = 0;
    for (const auto& p : parts) total += p.rows();
    FpMatrix out(f, total, cols);
    std::size_t r0 = 0;
    for (const auto& p : parts) {
        out.set_block(r0, 0, p);
        r0 += p.rows();
    }
    return out;
}

struct Component {
    FpMatrix basis;
    std::vector<std::uint64_t> omega;  // class-sum eigenvalue per class
};

}  // namespace

DecompositionReport decompose_ordinary(const FiniteMatrixGroup& g, const ClassData& classes,
                                       const std::vector<FpMatrix>& images) {
    const PrimeField& f = g.field();
    const std::uint64_t p = f.characteristic();
    const std::uint64_t order = g.order();
    if (order % p == 0) throw Error(ErrorKind::NotOrdinary, "p divides the group order");
    if (images.size() != order) throw Error(ErrorKind::DimensionMismatch, "one module matrix per group element");
    const std::size_t dim = images.front().rows();

    std::vector<Component> comps{{FpMatrix::identity(f, dim), {}}};
    for (const auto& cls : classes.classes) {
        FpMatrix z(f, dim, dim);
        for (auto x : cls.members) z = z + images[x];
        std::vector<Component> next;
        for (const auto& c : comps) {
            const FpMatrix r = coordinates(c.basis, c.basis * z.transpose()).transpose();
            std::size_t found = 0;
            for (auto w : roots_in_prime_field(charpoly(r))) {
                const FpMatrix e = nullspace(r.shifted(w));
                found += e.rows();
                Component sub{e * c.basis, c.omega};
                sub.omega.push_back(w);
                next.push_back(std::move(sub));
            }
            if (found != c.basis.rows())
                throw Error(ErrorKind::NotOrdinary, "class sums are not diagonalizable over F_" + std::to_string(p));
        }
        comps = std::move(next);
    }

    std::vector<std::size_t> gen_index;
    for (const auto& s : g.generators()) gen_index.push_back(g.index_of(s));

    DecompositionReport rep;
    rep.method = "ordinary";
    rep.module_dim = dim;
    for (auto& c : comps) {
        const std::size_t wdim = c.basis.rows();
        std::uint64_t s = 0;
        for (std::size_t j = 0; j < classes.classes.size(); ++j) {
            const auto& cls = classes.classes[j];
            const auto term = f.mul(c.omega[j], c.omega[cls.inverse_class]);
            s = f.add(s, f.div(term, f.from_int(static_cast<long>(cls.members.size()))));
        }
        const std::uint64_t sq = f.div(f.from_int(static_cast<long>(order)), s);
        std::vector<std::size_t> cands;
        for (std::size_t d = 1; d * d <= order; ++d)
            if (order % d == 0 && wdim % d == 0 && f.from_int(static_cast<long>(d * d)) == sq) cands.push_back(d);
        std::size_t d = 0;
        if (cands.size() == 1) {
            d = cands.front();
        } else {
            std::vector<FpMatrix> gens;
            for (auto gi : gen_index) gens.push_back(images[gi]);
            const Module w = submodule(Module(f, dim, gens), c.basis);
            d = composition_factors(w).front().module.dim;
        }
        Constituent con;
        con.dimension = d;
        con.multiplicity = wdim / d;
        for (std::size_t j = 0; j < classes.classes.size(); ++j) {
            const auto size = f.from_int(static_cast<long>(classes.classes[j].members.size()));
            con.character.push_back(f.div(f.mul(c.omega[j], f.from_int(static_cast<long>(d))), size));
        }
        // <chi_M, chi> = multiplicity, computed from traces
        std::uint64_t ip = 0;
        for (std::size_t j = 0; j < classes.classes.size(); ++j) {
            const auto& cls = classes.classes[j];
            const FpMatrix& img = images[cls.representative];
            std::uint64_t tr = 0;
            for (std::size_t i = 0; i < dim; ++i) tr = f.add(tr, img(i, i));
            const auto term = f.mul(f.from_int(static_cast<long>(cls.members.size())), f.mul(tr, con.character[cls.inverse_class]));
            ip = f.add(ip, term);
        }
        ip = f.div(ip, f.from_int(static_cast<long>(order)));
        if (ip != f.from_int(static_cast<long>(con.multiplicity)))
            throw Error(ErrorKind::DegenerateInput, "character inner product disagrees with the isotypic dimension");
        con.component = std::move(c.basis);
        rep.constituents.push_back(std::move(con));
    }
    std::sort(rep.constituents.begin(), rep.constituents.end(), [](const Constituent& a, const Constituent& b) {
        return a.dimension != b.dimension ? a.dimension < b.dimension : a.character < b.character;
    });
    return rep;
}

DecompositionReport decompose_modular(const Module& m) {
    const auto factors = composition_factors(m);
    std::vector<const IrreducibleModule*> reps;
    std::vector<std::size_t> counts;
    for (const auto& fac : factors) {
        bool matched = false;
        for (std::size_t r = 0; r < reps.size() && !matched; ++r) {
            if (reps[r]->module.dim == fac.module.dim && hom_dim(*reps[r], fac.module) > 0) {
                ++counts[r];
                matched = true;
            }
        }
        if (!matched) {
            reps.push_back(&fac);
            counts.push_back(1);
        }
    }
    DecompositionReport rep;
    rep.method = "modular";
    rep.module_dim = m.dim;
    std::size_t socle = 0;
    for (std::size_t r = 0; r < reps.size(); ++r) {
        socle += hom_dim(*reps[r], m) * reps[r]->module.dim;
        Constituent c;
        c.dimension = reps[r]->module.dim;
        c.multiplicity = counts[r];
        rep.constituents.push_back(std::move(c));
    }
    rep.semisimple = socle == m.dim;
    std::stable_sort(rep.constituents.begin(), rep.constituents.end(),
                     [](const Constituent& a, const Constituent& b) { return a.dimension < b.dimension; });
    return rep;
}

Module adjoint_module(const std::vector<FpMatrix>& gens) {
    std::vector<FpMatrix> out;
    for (const auto& g : gens) out.push_back(adjoint_action(g));
    return Module(std::move(out));
}

namespace {

FpMatrix restrict_to(const FpMatrix& basis, const FpMatrix& action) {
    return coordinates(basis, basis * action.transpose()).transpose();
}

}  // namespace

Module adjoint0_module(const std::vector<FpMatrix>& gens) {
    const PrimeField& f = gens.at(0).field();
    const std::size_t n = gens.at(0).rows();
    const FpMatrix t = traceless_basis(f, n);
    std::vector<FpMatrix> out;
    for (const auto& g : gens) out.push_back(restrict_to(t, adjoint_action(g)));
    return Module(f, n * n - 1, std::move(out));
}

DecompositionReport adjoint_decomposition_ordinary(const FiniteMatrixGroup& g) {
    if (g.order() % g.field().characteristic() == 0)
        throw Error(ErrorKind::NotOrdinary, "characteristic divides the group order");
    std::vector<FpMatrix> images;
    for (const auto& x : g.elements()) images.push_back(adjoint_action(x));
    return decompose_ordinary(g, conjugacy_classes(g), images);
}

DecompositionReport adjoint_decomposition(const FiniteMatrixGroup& g) {
    if (g.order() % g.field().characteristic() != 0) return adjoint_decomposition_ordinary(g);
    return decompose_modular(adjoint_module(g.generators()));
}

std::size_t h0_dim(const Module& m) {
    std::vector<FpMatrix> parts;
    for (const auto& g : m.gens) parts.push_back(g.shifted(m.field.one()));
    return m.dim - rank(stack_rows(m.field, parts, m.dim));
}

std::size_t h1_dim(const FiniteMatrixGroup& g, const Module& m) {
    const PrimeField& f = m.field;
    const std::size_t k = m.gens.size();
    const std::size_t d = m.dim;
    const std::size_t u = k * d;
    const std::size_t order = g.order();
    if (k != g.generators().size()) throw Error(ErrorKind::DimensionMismatch, "module and group generators differ");
    if (static_cast<double>(order) * d * u > 2e8) throw Error(ErrorKind::TooLarge, "cocycle system too large");

    // rho[i] = module image of element i; cocycle value f(x_i) = F[i] * unknowns
    std::vector<FpMatrix> rho, fv;
    rho.push_back(FpMatrix::identity(f, d));
    fv.push_back(FpMatrix(f, d, u));
    for (std::size_t i = 1; i < order; ++i) {
        const std::size_t par = g.parent(i), s = g.via(i);
        rho.push_back(rho[par] * m.gens[s]);
        fv.push_back(fv[par]);
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t c = 0; c < d; ++c) fv[i](r, s * d + c) = f.add(fv[i](r, s * d + c), rho[par](r, c));
    }
    // f(x_i g_s) = f(x_i) + rho(x_i) f(g_s) on every non-tree edge
    RowEchelon relations(f, u);
    for (std::size_t i = 0; i < order && relations.size() < u; ++i) {
        for (std::size_t s = 0; s < k; ++s) {
            const std::size_t j = g.times_generator(i, s);
            if (j != 0 && g.parent(j) == i && g.via(j) == s) continue;
            for (std::size_t r = 0; r < d; ++r) {
                std::vector<std::uint64_t> eq(u);
                for (std::size_t c = 0; c < u; ++c) eq[c] = f.sub(fv[j](r, c), fv[i](r, c));
                for (std::size_t c = 0; c < d; ++c) eq[s * d + c] = f.sub(eq[s * d + c], rho[i](r, c));
                relations.insert(eq);
            }
        }
    }
    const std::size_t z1 = u - relations.size();
    const std::size_t b1 = d - h0_dim(m);
    return z1 - b1;
}

FpMatrix largest_submodule_in(const Module& m, const FpMatrix& u) {
    FpMatrix cur = u.rows() ? row_basis(u) : u;
    while (cur.rows() > 0) {
        const FpMatrix ann = nullspace(cur);  // x in cur  <=>  ann x = 0
        if (ann.rows() == 0) return cur;      // cur is everything
        std::vector<FpMatrix> parts;
        for (const auto& g : m.gens) parts.push_back(ann * g * cur.transpose());
        const FpMatrix keep = nullspace(stack_rows(m.field, parts, cur.rows()));
        if (keep.rows() == cur.rows()) return cur;
        cur = keep.rows() ? keep * cur : FpMatrix(m.field, 0, m.dim);
    }
    return cur;
}

BignessReport bigness_check(const FiniteMatrixGroup& g) {
    const PrimeField& f = g.field();
    const std::size_t n = g.dimension();
    const std::size_t nn = n * n;
    BignessReport rep;
    const Module ad0 = adjoint0_module(g.generators());
    rep.h0_ad0 = h0_dim(ad0);
    {
        const FpMatrix t = traceless_basis(f, n);
        std::vector<FpMatrix> parts;
        for (const auto& x : g.elements()) parts.push_back(restrict_to(t, adjoint_action(x)).shifted(f.one()));
        rep.h0_ad0_all_elements = ad0.dim - rank(stack_rows(f, parts, ad0.dim));
    }
    rep.h1_ad0 = h1_dim(g, ad0);
    rep.adjoint = adjoint_decomposition(g);

    // rank-one idempotents e = v w^T / (w^T v) onto one-dimensional
    // generalized eigenspaces; pi o X o i != 0  <=>  w^T X v != 0
    struct Idem {
        std::size_t element;
        std::uint64_t alpha;
        std::vector<std::uint64_t> v, w;
    };
    std::vector<Idem> idems;
    RowEchelon pairing_rows(f, nn);  // row r: X -> tr(e_r X)
    for (std::size_t i = 0; i < g.order(); ++i) {
        const FpMatrix& h = g.element(i);
        for (auto alpha : roots_in_prime_field(charpoly(h))) {
            const FpMatrix x = h.shifted(alpha);
            if (n - rank(power(x, static_cast<unsigned>(n))) != 1) continue;
            const FpMatrix v = nullspace(x), w = nullspace(x.transpose());
            std::vector<std::uint64_t> e(nn);
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = 0; b < n; ++b) e[b * n + a] = f.mul(v(0, a), w(0, b));
            pairing_rows.insert(e);
            idems.push_back({i, alpha, std::vector<std::uint64_t>(v.row(0).begin(), v.row(0).end()),
                             std::vector<std::uint64_t>(w.row(0).begin(), w.row(0).end())});
        }
    }
    const FpMatrix pairing = pairing_rows.matrix();
    rep.idempotent_span = pairing.rows();
    // W fails (viii) exactly when W lies in the common kernel of the pairings
    const Module ad = adjoint_module(g.generators());
    const FpMatrix blind = pairing.rows() ? nullspace(pairing) : FpMatrix::identity(f, nn);
    rep.viii_obstruction_dim = largest_submodule_in(ad, blind).rows();
    rep.condition_viii = rep.viii_obstruction_dim == 0;

    for (std::size_t c = 0; c < rep.adjoint.constituents.size(); ++c) {
        const auto& con = rep.adjoint.constituents[c];
        ViiiWitness wit;
        wit.constituent = c;
        if (con.component) {
            const FpMatrix& xs = *con.component;
            for (const auto& id : idems) {
                for (std::size_t r = 0; r < xs.rows() && !wit.found; ++r) {
                    std::uint64_t val = 0;
                    for (std::size_t a = 0; a < n; ++a)
                        for (std::size_t b = 0; b < n; ++b)
                            val = f.add(val, f.mul(id.w[a], f.mul(xs(r, a * n + b), id.v[b])));
                    if (val != 0) {
                        wit.found = true;
                        wit.element = id.element;
                        wit.alpha = id.alpha;
                    }
                }
                if (wit.found) break;
            }
        }
        rep.witnesses.push_back(wit);
    }

    if (rep.h0_ad0 != 0) rep.reasons.push_back("H0(ad0) has dimension " + std::to_string(rep.h0_ad0));
    if (rep.h1_ad0 != 0) rep.reasons.push_back("H1(ad0) has dimension " + std::to_string(rep.h1_ad0));
    if (!rep.condition_viii) {
        std::string which;
        for (const auto& w : rep.witnesses) {
            if (w.found || !rep.adjoint.constituents[w.constituent].component) continue;
            const auto& con = rep.adjoint.constituents[w.constituent];
            which += (which.empty() ? "" : ", ") + std::to_string(con.dimension) + "-dim constituent #" +
                     std::to_string(w.constituent);
        }
        rep.reasons.push_back("condition (viii): a submodule of End(V) of dimension " +
                              std::to_string(rep.viii_obstruction_dim) +
                              " is invisible to every one-dimensional generalized eigenspace" +
                              (which.empty() ? "" : " (no witness for " + which + ")"));
    }
    rep.big = rep.h0_ad0 == 0 && rep.h1_ad0 == 0 && rep.condition_viii;
    return rep;
}

}  // namespace g2rigid
