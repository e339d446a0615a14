#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "g2rigid/error.hpp"
#include "g2rigid/orchestrator.hpp"

using namespace g2rigid;

int main(int argc, char** argv) {
    CLI::App app{"Rigid G2 local systems: construction, certificates and point counts"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);
    app.fallthrough();

    RunConfig cfg;
    std::string variant = "consecutive";
    std::string recipe_file;
    app.add_option("--cache-dir", cfg.cache_dir, "Content-addressed result cache")->envname(kCacheEnvVar);
    app.add_option("--budget", cfg.budget, "Work budget for point enumeration")->capture_default_str();
    app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    app.add_option("--variant", variant, "Reading of X_8: consecutive or cyclic")->capture_default_str();
    app.add_option("--workers", cfg.workers, "Worker threads (0: all available)")->check(CLI::NonNegativeNumber);
    app.add_option("--recipe", recipe_file, "Recipe file replacing the search")->check(CLI::ExistingFile);
    app.add_option("--max-convolutions", cfg.bounds.max_convolutions, "Search bound")->capture_default_str();
    app.add_option("--max-rank", cfg.bounds.max_rank, "Search bound")->capture_default_str();

    app.add_subcommand("triple", "Construct the rank-7 triple and certify it over Q");

    auto* certify = app.add_subcommand("certify", "Generation certificates modulo primes");
    certify->add_option("--ell", cfg.ells, "Primes")->delimiter(',')->capture_default_str();

    auto* hmodule = app.add_subcommand("hmodule", "Adjoint decomposition and bigness of H56");
    hmodule->add_option("--ellprime", cfg.ellprime, "Prime = 1 mod 7")->capture_default_str();

    auto* sl2 = app.add_subcommand("sl2", "Adjoint decomposition of Sym^m of SL2(F_ell)");
    sl2->add_option("--ell", cfg.ell, "Prime")->capture_default_str();
    sl2->add_option("--power", cfg.power, "Symmetric power m")->check(CLI::PositiveNumber)->capture_default_str();

    for (const char* name : {"count", "zeta"}) {
        auto* sub = app.add_subcommand(name, std::string(name) == "count" ? "Character sums T_k over F_{q^k}"
                                                                          : "Character sums and zeta fit");
        sub->add_option("--q", cfg.q, "Field size")->capture_default_str();
        sub->add_option("--s", cfg.s, "Parameter in the prime field")->capture_default_str();
        sub->add_option("--kmax", cfg.kmax, "Largest extension degree")->check(CLI::PositiveNumber)->capture_default_str();
    }

    auto* predict = app.add_subcommand("predict", "Local monodromy types at a rational parameter");
    predict->add_option("--s", cfg.s_rational, "Rational s")->capture_default_str();

    CLI11_PARSE(app, argc, argv);
    cfg.command = app.get_subcommands().front()->get_name();

    try {
        cfg.variant = parse_factor_variant(variant);
        if (!recipe_file.empty()) {
            std::ifstream in(recipe_file);
            std::ostringstream text;
            text << in.rdbuf();
            cfg.recipe = text.str();
        }
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    const RunOutcome out = run_command(cfg);
    std::cout << render(out.report, cfg.format);
    if (!cfg.cache_dir.empty())
        std::cerr << "cache: " << out.cache_hits << " hits, " << out.cache_misses << " misses\n";
    if (out.report.contains("error")) std::cerr << out.report["error"]["message"].get<std::string>() << "\n";
    return out.exit_code;
}
