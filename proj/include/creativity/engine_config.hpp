#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "creativity/experiments.hpp"

namespace creativity {

struct EnginePaths {
    std::filesystem::path schema;
    std::filesystem::path artifacts;
    std::filesystem::path vectors;
    std::filesystem::path cache_dir = "cache";
    std::filesystem::path output_dir = "out";
};

// Everything a pipeline run needs. Defaults run end to end on a minimal
// config that only names the three input files.
struct EngineConfig {
    EnginePaths paths;
    GraphConfig graph;
    UnexpectednessConfig unexpectedness;
    double lambda = 1.0;
    int k = 5;
    std::uint64_t seed = 0;
    double train_fraction = 0.8;
    double variance_fraction = 0.90;
    std::vector<FeatureCombination> combinations = FeatureCombination::all();
    std::vector<std::string> labels;
    unsigned threads = 1;
    bool strict = false;

    BenchmarkConfig benchmark_config() const;
    void validate() const;
};

// Relative paths resolve against base_dir. Unknown keys are a UsageError.
EngineConfig parse_engine_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
EngineConfig load_engine_config(const std::filesystem::path& path);

// Paths are written relative to base_dir when possible.
nlohmann::json to_json(const EngineConfig& config, const std::filesystem::path& base_dir);

}  // namespace creativity
