#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "g2rigid/frobenius.hpp"
#include "g2rigid/recipe.hpp"

namespace g2rigid {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kSchemaVersion = "1";
inline constexpr const char* kCacheEnvVar = "G2RIGID_CACHE_DIR";

struct RunConfig {
    std::string command;

    // global
    std::uint64_t budget = kDefaultBudget;
    std::string cache_dir;  // empty: no cache
    std::string format = "json";
    FactorVariant variant = FactorVariant::Consecutive;
    std::optional<std::string> recipe;  // explicit recipe text replaces the search
    SearchBounds bounds;
    int workers = 0;  // 0: available parallelism

    // per command
    std::vector<std::uint64_t> ells{7, 11, 13, 101};
    std::uint64_t ellprime = 29;
    std::uint64_t ell = 17;
    int power = 6;
    std::uint64_t q = 3;
    std::int64_t s = 2;
    int kmax = 7;
    std::string s_rational = "8/5";
};

/// Exit codes: 0 every certificate passed, 1 some certificate failed,
/// 2 invalid input or a computation error.
struct RunOutcome {
    nlohmann::json report;
    int exit_code = 0;
    std::size_t cache_hits = 0;
    std::size_t cache_misses = 0;
};

/// Runs one command and assembles its self-describing report. Never throws
/// for computation errors; they become an "error" object and exit code 2.
RunOutcome run_command(const RunConfig& cfg);

/// JSON (pretty, sorted keys) or CSV. CSV is a term table for count and
/// zeta, and flattened (path, value) rows otherwise.
std::string render(const nlohmann::json& report, const std::string& format);

/// The report with the duration field removed: the determinism contract.
nlohmann::json strip_volatile(const nlohmann::json& report);

std::string sha256_hex(const std::string& data);

/// Content-addressed on-disk store: one JSON record per key under
/// <root>/<kind>/<h[0:2]>/<h>.json, h = sha256 of the canonical key. Writes go
/// to a temporary file and are renamed into place.
class FileCache {
public:
    explicit FileCache(std::filesystem::path root);

    std::optional<nlohmann::json> load(const std::string& kind, const nlohmann::json& key);
    void store(const std::string& kind, const nlohmann::json& key, const nlohmann::json& value);
    std::filesystem::path path_for(const std::string& kind, const nlohmann::json& key) const;

    std::size_t hits() const { return hits_; }
    std::size_t misses() const { return misses_; }

private:
    std::filesystem::path root_;
    std::size_t hits_ = 0;
    std::size_t misses_ = 0;
};

/// Series terms stored in a FileCache.
class FileSeriesCache : public SeriesCache {
public:
    explicit FileSeriesCache(FileCache& cache) : cache_(cache) {}
    std::optional<SeriesTerm> load(const SeriesKey& key) override;
    void store(const SeriesKey& key, const SeriesTerm& term) override;

private:
    FileCache& cache_;
};

nlohmann::json to_json(const SeriesKey& key);
nlohmann::json to_json(const SeriesTerm& term);
SeriesTerm series_term_from_json(const nlohmann::json& j);

}  // namespace g2rigid
