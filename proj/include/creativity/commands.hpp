#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "creativity/engine_config.hpp"
#include "creativity/experiments.hpp"

namespace creativity {

// Pipeline stages behind the CLI subcommands. Each stage refreshes the
// stages it depends on when their cached content hash no longer matches.

struct IngestOutcome {
    Corpus corpus;  // imputed and normalized
    LoadReport report;
    std::string corpus_hash;
    bool cache_reused = false;
};

struct ScoresOutcome {
    IngestOutcome ingest;
    std::vector<GraphScores> scores;
    std::string scores_hash;
    bool cache_reused = false;
};

IngestOutcome cmd_ingest(const EngineConfig& config, std::ostream& log);
ScoresOutcome cmd_scores(const EngineConfig& config, std::ostream& log);
ExperimentReport cmd_benchmark(const EngineConfig& config, std::ostream& log);
std::vector<CorrelationCell> cmd_correlate(const EngineConfig& config, std::ostream& log);

struct SynthRequest {
    std::size_t m = 500;
    std::size_t attributes = 4;
    std::uint64_t seed = 0;
    LabelRule rule = LabelRule::novelty_driven;
    std::filesystem::path output_dir = "synthetic";
};

// Writes the corpus files plus a config.json that points at them.
void cmd_synth(const SynthRequest& request, const EngineConfig& engine, std::ostream& log);

nlohmann::json corpus_to_json(const Corpus& corpus);
Corpus corpus_from_json(const nlohmann::json& j);

}  // namespace creativity
