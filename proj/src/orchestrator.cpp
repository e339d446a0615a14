#include "g2rigid/orchestrator.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <sstream>

#include <omp.h>
#include <openssl/evp.h>
#include <unistd.h>

#include "g2rigid/finite_group.hpp"
#include "g2rigid/g2_forms.hpp"
#include "g2rigid/rep_analysis.hpp"

namespace g2rigid {

using json = nlohmann::json;

namespace {

template <class T>
std::string num(const T& v) {
    if constexpr (std::is_same_v<T, mpz_class> || std::is_same_v<T, mpq_class>) {
        return v.get_str();
    } else {
        return std::to_string(v);
    }
}

json error_json(const Error& e) {
    return {{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}};
}

json matrix_json(const QMatrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j).get_str());
        rows.push_back(row);
    }
    return rows;
}

json lines_json(const std::string& text) {
    json out = json::array();
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) out.push_back(line);
    return out;
}

// ---- triple ----

struct TripleRun {
    Recipe recipe;
    json recipe_info;
    std::optional<Realization> realization;
};

TripleRun obtain_triple(const RunConfig& cfg, FileCache* cache) {
    TripleRun run;
    if (cfg.recipe) {
        run.recipe = Recipe::parse(*cfg.recipe);
        run.recipe_info = {{"source", "config"}};
    } else {
        const json key = {{"target", format_datum(RationalField{}, g2_target_datum())},
                          {"max_convolutions", num(cfg.bounds.max_convolutions)},
                          {"max_rank", num(cfg.bounds.max_rank)},
                          {"target_rank", num(cfg.bounds.target_rank)}};
        std::optional<json> hit = cache != nullptr ? cache->load("recipe", key) : std::nullopt;
        if (hit) {
            run.recipe = Recipe::parse(hit->at("recipe").get<std::string>());
            run.recipe_info = {{"source", "search"},
                               {"nodes_expanded", hit->at("nodes_expanded")},
                               {"depth", hit->at("depth")}};
        } else {
            const SearchResult found = search_recipe(g2_target_datum(), cfg.bounds);
            run.recipe = found.recipe;
            run.recipe_info = {{"source", "search"},
                               {"nodes_expanded", num(found.nodes_expanded)},
                               {"depth", num(found.depth)}};
            if (cache != nullptr)
                cache->store("recipe", key,
                             {{"recipe", found.recipe.to_text()},
                              {"nodes_expanded", num(found.nodes_expanded)},
                              {"depth", num(found.depth)}});
        }
    }
    run.recipe_info["steps"] = lines_json(run.recipe.to_text());
    run.realization = realize(run.recipe);
    run.recipe_info["ranks"] = json::array();
    for (auto r : run.realization->ranks) run.recipe_info["ranks"].push_back(num(r));
    return run;
}

std::pair<json, bool> triple_certificates(const QTuple& t, const mpz_class& denominator) {
    const RationalField q;
    json c;
    const bool product = t.product_relation_holds();
    const QLocalDatum datum = signed_unit_datum(t);
    const bool profile = datum == g2_target_datum();
    const long index = rigidity_index(t);
    const auto d2 = invariant_form_space(t, 2);
    const auto d3 = invariant_form_space(t, 3);
    const auto sym3 = invariant_form_space(t.all(), 3, Symmetry::Symmetric);
    std::optional<std::size_t> lie;
    if (d2.dimension >= 1 && d3.dimension >= 1) lie = lie_stabilizer_dim<RationalField>({d2.basis[0], d3.basis[0]});

    c["rank"] = num(t.rank());
    c["product_relation"] = product;
    c["jordan_profile"] = format_datum(q, datum);
    c["expected_profile"] = format_datum(q, g2_target_datum());
    c["profile_matches"] = profile;
    c["rigidity_index"] = num(index);
    c["invariant_forms"] = {{"degree2_symmetric", num(d2.dimension)},
                            {"degree3_alternating", num(d3.dimension)},
                            {"degree3_symmetric", num(sym3.dimension)}};
    c["lie_stabilizer_dim"] = lie ? json(num(*lie)) : json(nullptr);
    c["denominator"] = num(denominator);
    const bool ok = product && profile && index == 2 && d2.dimension == 1 && d3.dimension == 1 && lie && *lie == 14;
    return {c, ok};
}

std::pair<json, bool> cmd_triple(const RunConfig& cfg, FileCache* cache) {
    const TripleRun run = obtain_triple(cfg, cache);
    const QTuple& t = run.realization->tuple;
    auto [certs, ok] = triple_certificates(t, run.realization->denominator);
    json matrices = {{"A0", matrix_json(t.finite()[0])}, {"Ainf", matrix_json(t.infinity())}};
    if (t.finite_points() > 1) matrices["A1"] = matrix_json(t.finite()[1]);
    return {{{"recipe", run.recipe_info}, {"matrices", matrices}, {"certificates", certs}}, ok};
}

// ---- certify ----

std::pair<json, bool> cmd_certify(const RunConfig& cfg, FileCache* cache) {
    const TripleRun run = obtain_triple(cfg, cache);
    const auto [certs, triple_ok] = triple_certificates(run.realization->tuple, run.realization->denominator);
    json per = json::array();
    std::map<std::string, std::size_t> tally;
    bool all = triple_ok;
    for (std::uint64_t ell : cfg.ells) {
        json e = {{"ell", num(ell)}};
        try {
            const Reduction red = reduce_mod(run.realization->tuple, ell);
            const GenerationReport g = generation_certificate(red.tuple);
            e["verdict"] = to_string(g.verdict);
            e["profile"] = g.profile;
            e["profile_preserved"] = red.profile_preserved && g.profile_ok;
            e["product_relation"] = g.product_relation;
            e["ell_gt_5"] = g.ell_gt_5;
            e["enveloping_dim"] = num(g.enveloping_dim);
            e["invariant_forms"] = {{"degree2", num(g.form_dim2)}, {"degree3", num(g.form_dim3)}};
            e["reasons"] = g.reasons;
            e["mismatches"] = red.mismatches;
            ++tally[to_string(g.verdict)];
            all = all && g.verdict == Verdict::Generates;
        } catch (const Error& err) {
            e["error"] = error_json(err);
            ++tally["Error"];
            all = false;
        }
        per.push_back(e);
    }
    json summary = json::object();
    for (const auto& [k, v] : tally) summary[k] = num(v);
    return {{{"triple_ok", triple_ok},
             {"denominator", num(run.realization->denominator)},
             {"certificates", per},
             {"summary", summary}},
            all};
}

// ---- hmodule / sl2 ----

json decomposition_json(const DecompositionReport& d) {
    json cons = json::array();
    for (const auto& c : d.constituents) {
        json chars = json::array();
        for (auto v : c.character) chars.push_back(num(v));
        cons.push_back({{"dimension", num(c.dimension)}, {"multiplicity", num(c.multiplicity)}, {"character", chars}});
    }
    json ms = json::array();
    for (const auto& [dim, copies] : d.multiset()) ms.push_back({{"dimension", num(dim)}, {"copies", num(copies)}});
    return {{"method", d.method},
            {"module_dim", num(d.module_dim)},
            {"semisimple", d.semisimple},
            {"multiset", ms},
            {"constituents", cons}};
}

json group_json(const FiniteMatrixGroup& g, const ClassData* classes) {
    json j = {{"order", num(g.order())}, {"dimension", num(g.dimension())}, {"field", num(g.field().characteristic())}};
    if (classes != nullptr) {
        json cl = json::array();
        for (const auto& c : classes->classes)
            cl.push_back({{"size", num(c.members.size())}, {"element_order", num(c.element_order)}});
        j["classes"] = cl;
        j["class_count"] = num(classes->classes.size());
    }
    return j;
}

std::pair<json, bool> cmd_hmodule(const RunConfig& cfg) {
    const FiniteMatrixGroup g = build_h56(cfg.ellprime);
    const ClassData classes = conjugacy_classes(g);
    const BignessReport b = bigness_check(g);
    json wit = json::array();
    for (const auto& w : b.witnesses)
        wit.push_back({{"constituent", num(w.constituent)},
                       {"element", num(w.element)},
                       {"alpha", num(w.alpha)},
                       {"found", w.found}});
    json big = {{"h0_ad0", num(b.h0_ad0)},
                {"h0_ad0_all_elements", num(b.h0_ad0_all_elements)},
                {"h1_ad0", num(b.h1_ad0)},
                {"idempotent_span", num(b.idempotent_span)},
                {"viii_obstruction_dim", num(b.viii_obstruction_dim)},
                {"condition_viii", b.condition_viii},
                {"witnesses", wit},
                {"big", b.big},
                {"reasons", b.reasons}};
    return {{{"group", group_json(g, &classes)},
             {"adjoint", decomposition_json(b.adjoint)},
             {"bigness", big},
             {"verdict", b.big ? "Big" : "NotBig"}},
            b.big};
}

std::pair<json, bool> cmd_sl2(const RunConfig& cfg) {
    const FiniteMatrixGroup g(sym_power_rep(cfg.ell, static_cast<unsigned>(cfg.power)));
    const DecompositionReport d = adjoint_decomposition(g);
    std::map<std::size_t, std::size_t> expected;
    for (int j = 0; j <= cfg.power; ++j) expected[static_cast<std::size_t>(2 * j + 1)] = 1;
    json exp = json::array();
    for (const auto& [dim, copies] : expected) exp.push_back({{"dimension", num(dim)}, {"copies", num(copies)}});
    const bool matches = d.multiset() == expected && d.semisimple;
    return {{{"group", group_json(g, nullptr)},
             {"adjoint", decomposition_json(d)},
             {"expected", exp},
             {"matches_expected", matches}},
            matches};
}

// ---- count / zeta ----

ChiSeries run_series(const RunConfig& cfg, FileCache* cache) {
    if (const int k = first_infeasible_k(cfg.q, cfg.kmax, cfg.budget); k != 0)
        throw Error(ErrorKind::TooLarge, "k = " + std::to_string(k) + " is the smallest term above the budget");
    SeriesOptions opts;
    opts.k_max = cfg.kmax;
    opts.budget = cfg.budget;
    opts.variant = cfg.variant;
    std::optional<FileSeriesCache> sc;
    if (cache != nullptr) {
        sc.emplace(*cache);
        opts.cache = &*sc;
    }
    return chi_series(cfg.q, cfg.s, opts);
}

json series_json(const ChiSeries& s) {
    json terms = json::array();
    for (const auto& t : s.terms) terms.push_back(to_json(t));
    return {{"q", num(s.q)}, {"s", num(s.s)}, {"variant", to_string(s.variant)}, {"terms", terms}, {"clean", s.clean()}};
}

std::pair<json, bool> cmd_count(const RunConfig& cfg, FileCache* cache) {
    const ChiSeries s = run_series(cfg, cache);
    return {{{"series", series_json(s)}}, s.clean()};
}

json zeta_json(const ZetaReport& z) {
    json rec = json::array();
    for (const auto& c : z.recurrence) rec.push_back(c.get_str());
    json spectrum = json::array();
    for (const auto& t : z.spectrum)
        spectrum.push_back({{"re", t.lambda.real()},
                        {"im", t.lambda.imag()},
                        {"modulus", t.modulus},
                        {"multiplicity", num(t.multiplicity)},
                        {"count", t.count},
                        {"rounded_count", num(t.rounded_count)}});
    return {{"terms_used", num(z.terms_used)},
            {"recurrence", rec},
            {"model_length", num(z.model_length)},
            {"determined", z.determined},
            {"spectrum", spectrum},
            {"max_normalized_trace", z.max_normalized_trace},
            {"weil_bound", z.weil_bound},
            {"max_modulus", z.max_modulus},
            {"weil_ok", z.weil_ok},
            {"pure_weight6_roots", num(z.pure_weight6_roots)},
            {"pure_weight6_count", num(z.pure_weight6_count)},
            {"q3_is_eigenvalue", z.q3_is_eigenvalue},
            {"fit_residual", z.fit_residual},
            {"flags", z.flags}};
}

std::pair<json, bool> cmd_zeta(const RunConfig& cfg, FileCache* cache) {
    const ChiSeries s = run_series(cfg, cache);
    const ZetaReport z = zeta_analysis(s);
    return {{{"series", series_json(s)}, {"zeta", zeta_json(z)}}, s.clean() && z.weil_ok};
}

// ---- predict ----

mpq_class parse_rational(const std::string& text) {
    mpq_class v;
    const auto slash = text.find('/');
    if (text.empty() || v.set_str(text, 10) != 0 || (slash != std::string::npos && v.get_den() == 0))
        throw Error(ErrorKind::ParseError, "not a rational number: '" + text + "'");
    v.canonicalize();
    return v;
}

std::pair<json, bool> cmd_predict(const RunConfig& cfg) {
    const LocalTypePrediction p = local_type_prediction(parse_rational(cfg.s_rational));
    json primes = json::array();
    for (const auto& lp : p.primes)
        primes.push_back({{"p", num(lp.p)},
                          {"type", to_string(lp.type)},
                          {"nu_s", num(lp.nu_s)},
                          {"nu_one_minus_s", num(lp.nu_one_minus_s)}});
    json exps = json::array();
    for (int e : p.steinberg_frobenius_exponents) exps.push_back(num(e));
    return {{{"s", p.s.get_str()},
             {"primes", primes},
             {"s_minus_one", {{"a", num(p.a)}, {"b", num(p.b)}}},
             {"hypothesis_shape", p.hypothesis_shape},
             {"steinberg_frobenius_exponents", exps},
             {"frobenius_exponent_note",
              "Steinberg Frobenius eigenvalues read as 1, q, ..., q^6 up to twist; a listed eigenvalue 0 is taken as 1"}},
            true};
}

json config_json(const RunConfig& cfg) {
    return {{"budget", num(cfg.budget)},
            {"variant", to_string(cfg.variant)},
            {"recipe", cfg.recipe ? json(*cfg.recipe) : json(nullptr)},
            {"bounds",
             {{"max_convolutions", num(cfg.bounds.max_convolutions)},
              {"max_rank", num(cfg.bounds.max_rank)},
              {"target_rank", num(cfg.bounds.target_rank)}}}};
}

json inputs_json(const RunConfig& cfg) {
    const std::string& c = cfg.command;
    if (c == "certify") {
        json ells = json::array();
        for (auto e : cfg.ells) ells.push_back(num(e));
        return {{"ells", ells}};
    }
    if (c == "hmodule") return {{"ellprime", num(cfg.ellprime)}};
    if (c == "sl2") return {{"ell", num(cfg.ell)}, {"power", num(cfg.power)}};
    if (c == "count" || c == "zeta") return {{"q", num(cfg.q)}, {"s", num(cfg.s)}, {"kmax", num(cfg.kmax)}};
    if (c == "predict") return {{"s", cfg.s_rational}};
    return json::object();
}

}  // namespace

RunOutcome run_command(const RunConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    if (cfg.workers > 0) omp_set_num_threads(cfg.workers);
    RunOutcome out;
    json report = {{"schema_version", kSchemaVersion},
                   {"tool", "g2rigid"},
                   {"tool_version", kToolVersion},
                   {"command", cfg.command},
                   {"config", config_json(cfg)},
                   {"inputs", inputs_json(cfg)}};
    report["config_hash"] = sha256_hex(report["config"].dump());
    report["input_hash"] = sha256_hex(cfg.command + "\n" + report["inputs"].dump());

    std::optional<FileCache> cache;
    try {
        if (!cfg.cache_dir.empty()) cache.emplace(cfg.cache_dir);
        FileCache* c = cache ? &*cache : nullptr;
        std::pair<json, bool> result;
        const std::string& cmd = cfg.command;
        if (cmd == "triple") {
            result = cmd_triple(cfg, c);
        } else if (cmd == "certify") {
            result = cmd_certify(cfg, c);
        } else if (cmd == "hmodule") {
            result = cmd_hmodule(cfg);
        } else if (cmd == "sl2") {
            result = cmd_sl2(cfg);
        } else if (cmd == "count") {
            result = cmd_count(cfg, c);
        } else if (cmd == "zeta") {
            result = cmd_zeta(cfg, c);
        } else if (cmd == "predict") {
            result = cmd_predict(cfg);
        } else {
            throw Error(ErrorKind::ParseError, "unknown command '" + cmd + "'");
        }
        report["outputs"] = std::move(result.first);
        report["ok"] = result.second;
        out.exit_code = result.second ? 0 : 1;
    } catch (const Error& e) {
        report["error"] = error_json(e);
        report["ok"] = false;
        out.exit_code = 2;
    }
    if (cache) {
        out.cache_hits = cache->hits();
        out.cache_misses = cache->misses();
    }
    report["duration_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.report = std::move(report);
    return out;
}

json strip_volatile(const json& report) {
    json r = report;
    r.erase("duration_seconds");
    return r;
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string scalar_text(const json& v) {
    return v.is_string() ? v.get<std::string>() : v.dump();
}

}  // namespace

std::string render(const json& report, const std::string& format) {
    if (format == "json") return report.dump(2) + "\n";
    if (format != "csv") throw Error(ErrorKind::ParseError, "unknown format '" + format + "'");
    std::ostringstream out;
    const json* series = nullptr;
    if (report.contains("outputs") && report["outputs"].contains("series")) series = &report["outputs"]["series"];
    if (series != nullptr) {
        static const char* cols[] = {"k",      "field_size",    "modulus",      "t_chi",       "n_nonzero",
                                     "fiber_points", "method", "naive_checked", "naive_agrees", "alt_modulus",
                                     "alt_agrees"};
        out << "q,s,variant";
        for (const char* c : cols) out << "," << c;
        out << "\n";
        for (const auto& t : (*series)["terms"]) {
            out << scalar_text((*series)["q"]) << "," << scalar_text((*series)["s"]) << ","
                << scalar_text((*series)["variant"]);
            for (const char* c : cols) out << "," << csv_field(scalar_text(t[c]));
            out << "\n";
        }
        return out.str();
    }
    out << "path,value\n";
    const json flat = report.flatten();
    for (const auto& [path, value] : flat.items()) out << csv_field(path) << "," << csv_field(scalar_text(value)) << "\n";
    return out.str();
}

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error(ErrorKind::CacheUnavailable, "sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4U];
        out += hex[digest[i] & 15U];
    }
    return out;
}

FileCache::FileCache(std::filesystem::path root) : root_(std::move(root)) {
    std::error_code ec;
    std::filesystem::create_directories(root_, ec);
    if (ec || ::access(root_.c_str(), W_OK) != 0)
        throw Error(ErrorKind::CacheUnavailable, "cache directory " + root_.string() + " is not writable");
}

std::filesystem::path FileCache::path_for(const std::string& kind, const json& key) const {
    const std::string h = sha256_hex(kind + "\n" + key.dump());
    return root_ / kind / h.substr(0, 2) / (h + ".json");
}

std::optional<json> FileCache::load(const std::string& kind, const json& key) {
    const auto path = path_for(kind, key);
    std::ifstream in(path);
    if (!in) {
        ++misses_;
        return std::nullopt;
    }
    json record = json::parse(in, nullptr, false);
    if (record.is_discarded() || !record.is_object() || record.value("key", json()) != key || !record.contains("value")) {
        ++misses_;
        return std::nullopt;
    }
    ++hits_;
    return record["value"];
}

void FileCache::store(const std::string& kind, const json& key, const json& value) {
    static std::atomic<unsigned long> counter{0};
    const auto path = path_for(kind, key);
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorKind::CacheUnavailable, "cannot create " + path.parent_path().string());
    const auto tmp = path.string() + ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
    {
        std::ofstream out(tmp);
        out << json{{"key", key}, {"value", value}}.dump(2) << "\n";
        if (!out) throw Error(ErrorKind::CacheUnavailable, "cannot write " + tmp);
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(ErrorKind::CacheUnavailable, "cannot rename into " + path.string());
}

json to_json(const SeriesKey& key) {
    return {{"q", num(key.q)}, {"k", num(key.k)}, {"s", num(key.s)}, {"variant", to_string(key.variant)}};
}

json to_json(const SeriesTerm& t) {
    return {{"k", num(t.k)},
            {"field_size", num(t.field_size)},
            {"modulus", t.modulus},
            {"t_chi", t.t_chi.get_str()},
            {"n_nonzero", t.n_nonzero.get_str()},
            {"fiber_points", mpz_class(t.fiber_points()).get_str()},
            {"method", t.method},
            {"naive_checked", t.naive_checked},
            {"naive_agrees", t.naive_agrees},
            {"alt_modulus", t.alt_modulus},
            {"alt_agrees", t.alt_agrees}};
}

SeriesTerm series_term_from_json(const json& j) {
    SeriesTerm t;
    t.k = std::stoi(j.at("k").get<std::string>());
    t.field_size = std::stoull(j.at("field_size").get<std::string>());
    t.modulus = j.at("modulus").get<std::string>();
    t.t_chi = mpz_class(j.at("t_chi").get<std::string>());
    t.n_nonzero = mpz_class(j.at("n_nonzero").get<std::string>());
    t.method = j.at("method").get<std::string>();
    t.naive_checked = j.at("naive_checked").get<bool>();
    t.naive_agrees = j.at("naive_agrees").get<bool>();
    t.alt_modulus = j.at("alt_modulus").get<std::string>();
    t.alt_agrees = j.at("alt_agrees").get<bool>();
    return t;
}

std::optional<SeriesTerm> FileSeriesCache::load(const SeriesKey& key) {
    const auto hit = cache_.load("series", to_json(key));
    if (!hit) return std::nullopt;
    try {
        return series_term_from_json(*hit);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

void FileSeriesCache::store(const SeriesKey& key, const SeriesTerm& term) {
    cache_.store("series", to_json(key), to_json(term));
}

}  // namespace g2rigid
