#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "creativity/dataset.hpp"
#include "creativity/graph.hpp"
#include "creativity/regression.hpp"
#include "creativity/unexpectedness.hpp"

namespace creativity {

// ---------------------------------------------------------------------------
// Per (attribute, kernel) scores

struct GraphScores {
    std::string attribute;
    Kernel kernel = Kernel::linear;
    CreativityScores scores;
    double threshold = 0.0;
    bool fully_dangling = false;
    // One entry per measure, indexed by UnexpectednessMeasure.
    std::vector<UnexpectednessVector> unexpectedness;

    std::string key() const;
    const UnexpectednessVector& unexpected(UnexpectednessMeasure measure) const;
};

// Similarity, graph and unexpectedness for every (attribute, kernel), in
// schema order with kernels linear before exponential. Expects an imputed,
// normalized corpus.
std::vector<GraphScores> compute_all_scores(const Corpus& corpus, const GraphConfig& graph,
                                            const UnexpectednessConfig& unexpectedness, unsigned threads = 1);

// Same, from precomputed (unclamped) similarity matrices aligned with the keys above.
std::vector<GraphScores> scores_from_similarities(const std::vector<SimilarityMatrix>& similarities,
                                                  std::span<const int> times, const GraphConfig& graph,
                                                  const UnexpectednessConfig& unexpectedness, unsigned threads = 1);

std::vector<SimilarityMatrix> compute_all_similarities(const Corpus& corpus, unsigned threads = 1);

// ---------------------------------------------------------------------------
// Feature combinations

enum class FeatureGroup { pca, unexpectedness, novelty, influence, aggregate };

struct FeatureCombination {
    std::string code;
    std::vector<FeatureGroup> included;  // PCA first, then measures in code order

    bool includes(FeatureGroup group) const;

    static FeatureCombination parse(std::string_view code);
    static std::vector<FeatureCombination> all();
};

std::vector<FeatureCombination> parse_combination_list(std::string_view csv);

struct FeatureMatrix {
    Matrix values;
    std::vector<std::string> names;
};

FeatureMatrix assemble_features(const ValueFeatures& value, const std::vector<GraphScores>& scores,
                                UnexpectednessMeasure measure, const FeatureCombination& combination);

// ---------------------------------------------------------------------------
// Statistics

// Sample Pearson correlation; UndefinedCorrelation when either series is constant.
double pearson(std::span<const double> x, std::span<const double> y);

double improvement_percent(double baseline_rmse, double best_rmse);

// ---------------------------------------------------------------------------
// Benchmark

struct BenchmarkConfig {
    GraphConfig graph;
    UnexpectednessConfig unexpectedness;
    double variance_fraction = 0.90;
    double lambda = 1.0;
    int k = 5;
    SplitSpec split;
    std::vector<FeatureCombination> combinations = FeatureCombination::all();
    std::vector<std::string> labels;  // empty: every label in the corpus
    std::vector<ModelKind> models{ModelKind::ridge, ModelKind::knn};
    unsigned threads = 1;
};

struct RmseCell {
    std::string label;
    std::string combination;
    ModelKind model = ModelKind::ridge;
    double rmse = 0.0;
};

struct ImprovementRow {
    std::string label;
    ModelKind model = ModelKind::ridge;
    double baseline_rmse = 0.0;
    std::string best_combination;
    double best_rmse = 0.0;
    double improvement_percent = 0.0;
};

struct CorrelationCell {
    std::string attribute;
    Kernel kernel = Kernel::linear;
    std::string measure;  // novelty, influence, aggregate, unexpectedness_<measure>
    std::string label;
    std::optional<double> r;  // empty when undefined
};

struct GraphRunInfo {
    std::string key;
    int iterations = 0;
    bool converged = false;
    bool fully_dangling = false;
    double threshold = 0.0;
};

struct ExperimentReport {
    std::vector<RmseCell> rmse;
    std::vector<ImprovementRow> improvements;
    std::vector<CorrelationCell> correlations;
    std::vector<GraphRunInfo> graphs;
    nlohmann::json models = nlohmann::json::array();
    std::uint64_t seed = 0;
    std::string config_hash;

    std::optional<double> rmse_of(std::string_view label, std::string_view combination, ModelKind model) const;
    bool all_converged() const;
};

std::vector<ImprovementRow> improvement_rows(const std::vector<RmseCell>& cells);

std::vector<CorrelationCell> correlation_table(const Corpus& corpus, const std::vector<GraphScores>& scores,
                                               const std::vector<std::string>& labels = {});

// Runs the RMSE benchmark and correlation analysis on precomputed inputs.
ExperimentReport run_benchmark(const Corpus& corpus, const ValueFeatures& value,
                               const std::vector<GraphScores>& scores, const BenchmarkConfig& config);

// Full pipeline from an imputed, normalized corpus.
ExperimentReport run_benchmark(const Corpus& corpus, const BenchmarkConfig& config);

nlohmann::json canonical_json(const BenchmarkConfig& config);

// ---------------------------------------------------------------------------
// Report files

void write_rmse_csv(const std::filesystem::path& path, const ExperimentReport& report);
// One wide table per label: combinations as rows, models as columns, Improvement% last.
void write_rmse_tables(const std::filesystem::path& dir, const ExperimentReport& report);
void write_improvements_csv(const std::filesystem::path& path, const ExperimentReport& report);
void write_correlations_csv(const std::filesystem::path& path, const std::vector<CorrelationCell>& cells);
// One matrix per measure: attribute-kernel rows, label columns.
void write_heatmaps(const std::filesystem::path& dir, const std::vector<CorrelationCell>& cells);
void write_report(const std::filesystem::path& dir, const ExperimentReport& report);

std::string format_real(double value);

// ---------------------------------------------------------------------------
// Synthetic corpora

enum class LabelRule { value_only, novelty_driven, unexpectedness_driven };

LabelRule parse_label_rule(std::string_view text);
std::string_view to_string(LabelRule rule);

struct SyntheticOptions {
    int first_year = 1960;
    int year_span = 50;
    std::size_t vector_dimension = 6;
    std::size_t styles = 4;
    double missing_rate = 0.02;
    double noise = 0.05;
    GraphConfig graph;
    UnexpectednessConfig unexpectedness;
};

// Attributes alternate numeric / vector. One label, "rating", with maximum 1.
Corpus generate_synthetic_corpus(std::size_t m, std::size_t attributes, std::uint64_t seed, LabelRule rule,
                                 const SyntheticOptions& options = {});

// Writes schema.json, artifacts.csv and vectors.jsonl.
void write_corpus_files(const Corpus& corpus, const std::filesystem::path& dir);

}  // namespace creativity
