#include "g2rigid/recipe.hpp"

#include <sstream>

namespace g2rigid {

std::string Recipe::to_text() const {
    std::string out;
    for (const auto& s : steps) {
        if (s.kind == RecipeStep::Kind::Twist) {
            out += "twist";
            for (const auto& c : s.scalars) out += " " + c.get_str();
        } else {
            out += "mc " + s.lambda.get_str();
        }
        out += "\n";
    }
    return out;
}

Recipe Recipe::parse(const std::string& text) {
    Recipe r;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word) || word[0] == '#') continue;
        std::vector<mpq_class> values;
        std::string tok;
        while (ls >> tok) {
            mpq_class v;
            if (v.set_str(tok, 10) != 0)
                throw Error(ErrorKind::InvalidRecipe, "line " + std::to_string(lineno) + ": bad number '" + tok + "'");
            v.canonicalize();
            values.push_back(v);
        }
        if (word == "twist") {
            if (values.empty()) throw Error(ErrorKind::InvalidRecipe, "line " + std::to_string(lineno) + ": twist needs scalars");
            r.steps.push_back(RecipeStep::twist(std::move(values)));
        } else if (word == "mc") {
            if (values.size() != 1) throw Error(ErrorKind::InvalidRecipe, "line " + std::to_string(lineno) + ": mc takes one lambda");
            r.steps.push_back(RecipeStep::convolution(values[0]));
        } else {
            throw Error(ErrorKind::InvalidRecipe, "line " + std::to_string(lineno) + ": unknown step '" + word + "'");
        }
    }
    return r;
}

QTuple seed_tuple() {
    const RationalField q;
    return QTuple({QMatrix::identity(q, 1), QMatrix::identity(q, 1)});
}

namespace {

QTuple apply_step(const QTuple& t, const RecipeStep& step) {
    if (step.kind == RecipeStep::Kind::Twist) return scalar_twist(t, step.scalars);
    return middle_convolution(t, step.lambda);
}

}  // namespace

Realization realize(const Recipe& recipe) {
    QTuple t = seed_tuple();
    std::vector<std::size_t> ranks;
    for (const auto& step : recipe.steps) {
        t = apply_step(t, step);
        ranks.push_back(t.rank());
    }
    mpz_class n = tuple_denominator(t);
    return {std::move(t), std::move(n), std::move(ranks)};
}

mpz_class tuple_denominator(const QTuple& t) {
    mpz_class l = 1;
    for (const auto& m : t.all())
        for (const auto& x : m.data()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
    mpz_class rad = 1;
    for (mpz_class p = 2; l > 1; ++p) {
        if (l % p != 0) continue;
        rad *= p;
        while (l % p == 0) l /= p;
    }
    return rad;
}

QLocalDatum signed_unit_datum(const QTuple& t) {
    return local_datum(t, {mpq_class(-1), mpq_class(1)});
}

QLocalDatum g2_target_datum() {
    return {
        {{mpq_class(-1), Partition({1, 1, 1, 1})}, {mpq_class(1), Partition({1, 1, 1})}},
        {{mpq_class(1), Partition({3, 2, 2})}},
        {{mpq_class(1), Partition({7})}},
    };
}

SearchResult search_recipe(const QLocalDatum& target, const SearchBounds& bounds) {
    struct Node {
        QTuple tuple;
        Recipe recipe;
    };
    const std::vector<std::vector<mpq_class>> twists = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
    std::vector<Node> level{{seed_tuple(), {}}};
    SearchResult result;

    for (int depth = 0; depth <= bounds.max_convolutions && !level.empty(); ++depth) {
        const std::size_t width = level.size() * twists.size();
        std::vector<int> hit(width, 0);
        std::vector<std::optional<Node>> children(width);

        // Branches are independent; selection below walks them in order.
#pragma omp parallel for schedule(dynamic)
        for (std::size_t idx = 0; idx < width; ++idx) {
            const Node& node = level[idx / twists.size()];
            const auto& c = twists[idx % twists.size()];
            QTuple twisted = scalar_twist(node.tuple, c);
            Recipe rec = node.recipe;
            rec.steps.push_back(RecipeStep::twist(c));
            if (twisted.rank() == bounds.target_rank && signed_unit_datum(twisted) == target) {
                hit[idx] = 1;
                children[idx] = Node{std::move(twisted), std::move(rec)};
                continue;
            }
            if (depth == bounds.max_convolutions) continue;
            try {
                QTuple conv = middle_convolution(twisted, mpq_class(-1));
                if (conv.rank() > bounds.max_rank) continue;
                rec.steps.push_back(RecipeStep::convolution(-1));
                children[idx] = Node{std::move(conv), std::move(rec)};
            } catch (const Error&) {
                // degenerate branch, pruned
            }
        }
        result.nodes_expanded += width;

        for (std::size_t idx = 0; idx < width; ++idx) {
            if (hit[idx]) {
                result.recipe = children[idx]->recipe;
                result.depth = depth;
                return result;
            }
        }
        std::vector<Node> next;
        for (auto& c : children)
            if (c) next.push_back(std::move(*c));
        level = std::move(next);
    }
    throw Error(ErrorKind::RecipeNotFound,
                "no recipe within " + std::to_string(bounds.max_convolutions) + " convolutions and rank <= " +
                    std::to_string(bounds.max_rank) + " (" + std::to_string(result.nodes_expanded) + " branches tried)");
}

}  // namespace g2rigid
