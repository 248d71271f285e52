#include <fmt/format.h>

#include "creativity/errors.hpp"
#include "creativity/experiments.hpp"
#include "creativity/parallel.hpp"

namespace creativity {

namespace {

constexpr UnexpectednessMeasure kMeasures[] = {UnexpectednessMeasure::max, UnexpectednessMeasure::mean,
                                               UnexpectednessMeasure::inverse_weighted};

struct GraphKey {
    std::size_t attribute;
    Kernel kernel;
};

std::vector<GraphKey> graph_keys(const Corpus& corpus) {
    std::vector<GraphKey> keys;
    for (std::size_t k = 0; k < corpus.attributes.size(); ++k)
        for (auto kernel : corpus.attributes[k].kernels()) keys.push_back({k, kernel});
    return keys;
}

}  // namespace

std::string GraphScores::key() const { return fmt::format("{}:{}", attribute, to_string(kernel)); }

const UnexpectednessVector& GraphScores::unexpected(UnexpectednessMeasure measure) const {
    return unexpectedness.at(static_cast<std::size_t>(measure));
}

std::vector<SimilarityMatrix> compute_all_similarities(const Corpus& corpus, unsigned threads) {
    const auto keys = graph_keys(corpus);
    std::vector<SimilarityMatrix> out(keys.size());
    parallel_for(keys.size(), threads, [&](std::size_t g) {
        out[g] = build_similarity_matrix(corpus, corpus.attributes[keys[g].attribute].name, keys[g].kernel);
    });
    return out;
}

std::vector<GraphScores> scores_from_similarities(const std::vector<SimilarityMatrix>& similarities,
                                                  std::span<const int> times, const GraphConfig& graph,
                                                  const UnexpectednessConfig& unexpectedness, unsigned threads) {
    graph.validate();
    unexpectedness.validate();
    std::vector<GraphScores> out(similarities.size());
    parallel_for(similarities.size(), threads, [&](std::size_t g) {
        const auto sim = clamp_negative(similarities[g]);
        const auto pair = build_graph_pair(sim, times, graph);
        GraphScores& gs = out[g];
        gs.attribute = sim.attribute;
        gs.kernel = sim.kernel;
        gs.scores = solve_scores(pair, graph);
        gs.threshold = pair.threshold;
        gs.fully_dangling = pair.fully_dangling();
        for (auto measure : kMeasures) {
            auto cfg = unexpectedness;
            cfg.measure = measure;
            gs.unexpectedness.push_back(unexpectedness_vector(sim.values, times, cfg));
        }
    });
    return out;
}

std::vector<GraphScores> compute_all_scores(const Corpus& corpus, const GraphConfig& graph,
                                            const UnexpectednessConfig& unexpectedness, unsigned threads) {
    const auto times = corpus.years();
    return scores_from_similarities(compute_all_similarities(corpus, threads), times, graph, unexpectedness,
                                    threads);
}

// ---------------------------------------------------------------------------

bool FeatureCombination::includes(FeatureGroup group) const {
    for (auto g : included)
        if (g == group) return true;
    return false;
}

FeatureCombination FeatureCombination::parse(std::string_view code) {
    if (code == "Baseline") return {"Baseline", {FeatureGroup::pca}};
    if (code.empty() || code.front() != 'P')
        throw ArgumentError(fmt::format("unknown feature combination '{}'", code));
    static const std::vector<std::string_view> known{"PN", "PI", "PU", "PUN", "PUI", "PUNI", "PUNIA"};
    if (std::find(known.begin(), known.end(), code) == known.end())
        throw ArgumentError(fmt::format("unknown feature combination '{}'", code));
    FeatureCombination out{std::string(code), {FeatureGroup::pca}};
    for (char c : code.substr(1)) {
        switch (c) {
            case 'U': out.included.push_back(FeatureGroup::unexpectedness); break;
            case 'N': out.included.push_back(FeatureGroup::novelty); break;
            case 'I': out.included.push_back(FeatureGroup::influence); break;
            case 'A': out.included.push_back(FeatureGroup::aggregate); break;
            default: throw ArgumentError(fmt::format("unknown feature combination '{}'", code));
        }
    }
    return out;
}

std::vector<FeatureCombination> FeatureCombination::all() {
    std::vector<FeatureCombination> out;
    for (auto code : {"Baseline", "PN", "PI", "PU", "PUN", "PUI", "PUNI", "PUNIA"}) out.push_back(parse(code));
    return out;
}

std::vector<FeatureCombination> parse_combination_list(std::string_view csv) {
    std::vector<FeatureCombination> out;
    std::size_t start = 0;
    while (start <= csv.size()) {
        const auto end = std::min(csv.find(',', start), csv.size());
        const auto item = csv.substr(start, end - start);
        if (!item.empty()) out.push_back(FeatureCombination::parse(item));
        start = end + 1;
    }
    if (out.empty()) throw ArgumentError("empty combination list");
    return out;
}

FeatureMatrix assemble_features(const ValueFeatures& value, const std::vector<GraphScores>& scores,
                                UnexpectednessMeasure measure, const FeatureCombination& combination) {
    const Eigen::Index m = value.matrix.rows();
    for (const auto& gs : scores) {
        if (gs.scores.aggregate.size() != m)
            throw IntegrityError(
                fmt::format("scores for {} cover {} artifacts, value features {}", gs.key(), gs.scores.aggregate.size(), m));
    }
    std::vector<const Vector*> columns;
    std::vector<std::string> names = value.column_names;
    for (auto group : combination.included) {
        if (group == FeatureGroup::pca) continue;
        for (const auto& gs : scores) {
            switch (group) {
                case FeatureGroup::unexpectedness:
                    columns.push_back(&gs.unexpected(measure).values);
                    names.push_back(fmt::format("unexpectedness_{}:{}", to_string(measure), gs.key()));
                    break;
                case FeatureGroup::novelty:
                    columns.push_back(&gs.scores.novelty);
                    names.push_back(fmt::format("novelty:{}", gs.key()));
                    break;
                case FeatureGroup::influence:
                    columns.push_back(&gs.scores.influence);
                    names.push_back(fmt::format("influence:{}", gs.key()));
                    break;
                case FeatureGroup::aggregate:
                    columns.push_back(&gs.scores.aggregate);
                    names.push_back(fmt::format("aggregate:{}", gs.key()));
                    break;
                case FeatureGroup::pca: break;
            }
        }
    }
    FeatureMatrix out;
    const Eigen::Index base = value.matrix.cols();
    out.values.resize(m, base + static_cast<Eigen::Index>(columns.size()));
    out.values.leftCols(base) = value.matrix;
    for (std::size_t c = 0; c < columns.size(); ++c) out.values.col(base + static_cast<Eigen::Index>(c)) = *columns[c];
    out.names = std::move(names);
    return out;
}

}  // namespace creativity
