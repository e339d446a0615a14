#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <random>
#include <thread>

#include "g2rigid/error.hpp"
#include "g2rigid/orchestrator.hpp"

using namespace g2rigid;
using nlohmann::json;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        std::random_device rd;
        path = std::filesystem::temp_directory_path() / ("g2rigid-test-" + std::to_string(rd()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

RunConfig config(const std::string& command) {
    RunConfig cfg;
    cfg.command = command;
    return cfg;
}

bool all_integer_strings(const json& j, const std::string& field) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items())
            if (!all_integer_strings(v, k)) return false;
    } else if (j.is_array()) {
        for (const auto& v : j)
            if (!all_integer_strings(v, field)) return false;
    } else if (j.is_number_integer() || j.is_number_unsigned()) {
        return false;
    }
    return true;
}

}  // namespace

TEST_CASE("sha256_hex") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("FileCache") {
    TempDir dir;
    FileCache cache(dir.path);
    const json key = {{"q", "3"}, {"k", "2"}};
    CHECK_FALSE(cache.load("series", key));
    CHECK(cache.misses() == 1);

    cache.store("series", key, {{"x", "42"}});
    const auto hit = cache.load("series", key);
    REQUIRE(hit);
    CHECK((*hit)["x"] == "42");
    CHECK(cache.hits() == 1);

    SUBCASE("layout") {
        const auto p = cache.path_for("series", key);
        const std::string h = p.stem().string();
        CHECK(h.size() == 64);
        CHECK(p.parent_path().filename() == h.substr(0, 2));
        CHECK(p.parent_path().parent_path() == dir.path / "series");
        CHECK(std::filesystem::exists(p));
        for (const auto& e : std::filesystem::recursive_directory_iterator(dir.path))
            CHECK(e.path().string().find(".tmp") == std::string::npos);
    }
    SUBCASE("kinds are separate") {
        CHECK_FALSE(cache.load("recipe", key));
    }
    SUBCASE("a record under the wrong key is rejected") {
        const json other = {{"q", "3"}, {"k", "3"}};
        std::ofstream(cache.path_for("series", other)) << json{{"key", key}, {"value", {{"x", "1"}}}}.dump();
        CHECK_FALSE(cache.load("series", other));
    }
    SUBCASE("a corrupt record is a miss") {
        std::ofstream(cache.path_for("series", key)) << "{not json";
        CHECK_FALSE(cache.load("series", key));
    }
    SUBCASE("overwrite") {
        cache.store("series", key, {{"x", "43"}});
        CHECK((*cache.load("series", key))["x"] == "43");
    }
}

TEST_CASE("FileCache refuses an unusable root") {
    TempDir dir;
    const auto file = dir.path / "plain";
    std::ofstream(file) << "x";
    try {
        FileCache bad(file);
        FAIL("expected CacheUnavailable");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::CacheUnavailable);
    }

    RunConfig cfg = config("predict");
    cfg.cache_dir = file.string();
    const RunOutcome out = run_command(cfg);
    CHECK(out.exit_code == 2);
    CHECK(out.report["error"]["kind"] == "CacheUnavailable");
}

TEST_CASE("series term JSON round trip") {
    SeriesTerm t;
    t.k = 5;
    t.field_size = 243;
    t.modulus = "T^5+2T+1";
    t.t_chi = mpz_class("-28103281");
    t.n_nonzero = mpz_class("195134415498725");
    t.method = "direct";
    t.naive_checked = false;
    t.alt_modulus = "T^5+2T+2";
    const json j = to_json(t);
    CHECK(j["fiber_points"] == "195134387395444");
    const SeriesTerm back = series_term_from_json(j);
    CHECK(to_json(back) == j);
    CHECK(back.t_chi == t.t_chi);
    CHECK_FALSE(back.from_cache);
    CHECK(to_json(SeriesKey{9, 2, 2, FactorVariant::Cyclic}) ==
          json{{"q", "9"}, {"k", "2"}, {"s", "2"}, {"variant", "cyclic"}});
}

TEST_CASE("report envelope") {
    const RunOutcome out = run_command(config("sl2"));
    const json& r = out.report;
    CHECK(out.exit_code == 0);
    CHECK(r["schema_version"] == kSchemaVersion);
    CHECK(r["tool"] == "g2rigid");
    CHECK(r["command"] == "sl2");
    CHECK(r["ok"] == true);
    CHECK(r["inputs"] == json{{"ell", "17"}, {"power", "6"}});
    CHECK(r["config_hash"].get<std::string>().size() == 64);
    CHECK(r["duration_seconds"].is_number());
    CHECK(all_integer_strings(strip_volatile(r), ""));
    CHECK_FALSE(strip_volatile(r).contains("duration_seconds"));

    RunConfig other = config("sl2");
    other.power = 4;
    const json r2 = run_command(other).report;
    CHECK(r2["config_hash"] == r["config_hash"]);
    CHECK(r2["input_hash"] != r["input_hash"]);
    other.budget = 5;
    CHECK(run_command(other).report["config_hash"] != r["config_hash"]);
}

TEST_CASE("exit codes") {
    CHECK(run_command(config("predict")).exit_code == 0);
    CHECK(run_command(config("hmodule")).exit_code == 1);  // H56 at 29 is not big
    CHECK(run_command(config("nonsense")).exit_code == 2);

    RunConfig bad = config("hmodule");
    bad.ellprime = 11;
    const RunOutcome r = run_command(bad);
    CHECK(r.exit_code == 2);
    CHECK(r.report["error"]["kind"] == "BadResidue");
    CHECK_FALSE(r.report.contains("outputs"));

    RunConfig recipe = config("triple");
    recipe.recipe = "twist 1 1\nbogus\n";
    CHECK(run_command(recipe).exit_code == 2);
    recipe.recipe = "twist -1 -1\nmc -1\n";
    const RunOutcome small = run_command(recipe);
    CHECK(small.exit_code == 1);
    CHECK(small.report["outputs"]["certificates"]["rank"] == "2");
    CHECK(small.report["outputs"]["certificates"]["lie_stabilizer_dim"].is_null());
}

TEST_CASE("predict") {
    RunConfig cfg = config("predict");
    json o = run_command(cfg).report["outputs"];
    CHECK(o["hypothesis_shape"] == true);
    REQUIRE(o["primes"].size() == 2);
    CHECK(o["primes"][0] == json{{"p", "3"}, {"type", "U(3)+U(2)+U(2)"}, {"nu_s", "0"}, {"nu_one_minus_s", "1"}});
    CHECK(o["primes"][1]["p"] == "5");
    CHECK(o["primes"][1]["type"] == "Steinberg-U(7)");

    cfg.s_rational = "2";
    o = run_command(cfg).report["outputs"];
    CHECK(o["hypothesis_shape"] == false);
    for (const auto& p : o["primes"]) CHECK(p["type"] != "Steinberg-U(7)");

    cfg.s_rational = "-6/4";
    CHECK(run_command(cfg).report["outputs"]["s"] == "-3/2");

    for (const char* bad : {"1", "0", "2/2"}) {
        cfg.s_rational = bad;
        const RunOutcome r = run_command(cfg);
        CHECK(r.exit_code == 2);
        CHECK(r.report["error"]["kind"] == "NotInBase");
    }
    for (const char* bad : {"abc", "", "1/0", "3/"}) {
        cfg.s_rational = bad;
        const RunOutcome r = run_command(cfg);
        CHECK(r.exit_code == 2);
        CHECK(r.report["error"]["kind"] == "ParseError");
    }
}

TEST_CASE("count: cache round trip and determinism") {
    TempDir dir;
    RunConfig cfg = config("count");
    cfg.kmax = 4;
    cfg.cache_dir = dir.path.string();

    const RunOutcome first = run_command(cfg);
    CHECK(first.exit_code == 0);
    CHECK(first.cache_hits == 0);
    const RunOutcome second = run_command(cfg);
    CHECK(second.cache_hits == 4);
    CHECK(strip_volatile(first.report).dump() == strip_volatile(second.report).dump());

    RunConfig fresh = cfg;
    fresh.cache_dir.clear();
    fresh.workers = 1;
    CHECK(strip_volatile(run_command(fresh).report).dump() == strip_volatile(first.report).dump());

    const json& terms = first.report["outputs"]["series"]["terms"];
    REQUIRE(terms.size() == 4);
    CHECK(terms[0]["t_chi"] == "-1");
    CHECK(terms[0]["n_nonzero"] == "5");
    CHECK(terms[1]["t_chi"] == "277");

    const std::string csv = render(first.report, "csv");
    CHECK(csv.rfind("q,s,variant,k,", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
    CHECK(csv.find("3,2,consecutive,1,3,T,-1,5,4,") != std::string::npos);

    // A tampered record is served as-is: the cache is trusted once the key matches.
    FileCache cache(dir.path);
    const json key = to_json(SeriesKey{3, 1, 2, FactorVariant::Consecutive});
    json rec = *cache.load("series", key);
    rec["t_chi"] = "-3";
    cache.store("series", key, rec);
    CHECK(run_command(cfg).report["outputs"]["series"]["terms"][0]["t_chi"] == "-3");
}

TEST_CASE("count errors") {
    RunConfig cfg = config("count");
    cfg.s = 1;
    CHECK(run_command(cfg).report["error"]["kind"] == "NotInBase");

    cfg.s = 2;
    cfg.q = 5;
    cfg.budget = 1000;
    const int k = first_infeasible_k(5, cfg.kmax, cfg.budget);
    REQUIRE(k >= 1);
    const RunOutcome r = run_command(cfg);
    CHECK(r.exit_code == 2);
    CHECK(r.report["error"]["kind"] == "TooLarge");
    CHECK(r.report["error"]["message"].get<std::string>().find("k = " + std::to_string(k)) != std::string::npos);
}

TEST_CASE("cyclic variant is threaded through") {
    RunConfig cfg = config("count");
    cfg.kmax = 2;
    cfg.variant = FactorVariant::Cyclic;
    const json r = run_command(cfg).report;
    CHECK(r["config"]["variant"] == "cyclic");
    CHECK(r["outputs"]["series"]["variant"] == "cyclic");
    cfg.variant = FactorVariant::Consecutive;
    CHECK(run_command(cfg).report["config_hash"] != r["config_hash"]);
}

TEST_CASE("render") {
    const json r = run_command(config("predict")).report;
    CHECK(json::parse(render(r, "json")) == r);
    const std::string csv = render(r, "csv");
    CHECK(csv.rfind("path,value\n", 0) == 0);
    CHECK(csv.find("/outputs/primes/1/type,Steinberg-U(7)") != std::string::npos);
    CHECK_THROWS_AS(render(r, "xml"), Error);
}

TEST_CASE("concurrent runs share a cache directory") {
    TempDir dir;
    RunConfig cfg = config("count");
    cfg.kmax = 3;
    cfg.cache_dir = dir.path.string();
    RunOutcome a, b;
    std::thread ta([&] { a = run_command(cfg); });
    std::thread tb([&] { b = run_command(cfg); });
    ta.join();
    tb.join();
    CHECK(a.exit_code == 0);
    CHECK(strip_volatile(a.report) == strip_volatile(b.report));
    const RunOutcome c = run_command(cfg);
    CHECK(c.cache_hits == 3);
    CHECK(strip_volatile(c.report) == strip_volatile(a.report));
    for (const auto& e : std::filesystem::recursive_directory_iterator(dir.path))
        CHECK(e.path().string().find(".tmp") == std::string::npos);
}
