#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "creativity/errors.hpp"
#include "creativity/experiments.hpp"
#include "creativity/hashing.hpp"
#include "creativity/parallel.hpp"

namespace creativity {

using nlohmann::json;

std::optional<double> ExperimentReport::rmse_of(std::string_view label, std::string_view combination,
                                                ModelKind model) const {
    for (const auto& cell : rmse)
        if (cell.label == label && cell.combination == combination && cell.model == model) return cell.rmse;
    return std::nullopt;
}

bool ExperimentReport::all_converged() const {
    return std::all_of(graphs.begin(), graphs.end(), [](const GraphRunInfo& g) { return g.converged; });
}

std::vector<ImprovementRow> improvement_rows(const std::vector<RmseCell>& cells) {
    // Keyed by first appearance so rows follow the table order.
    std::vector<std::pair<std::string, ModelKind>> groups;
    for (const auto& c : cells) {
        std::pair<std::string, ModelKind> key{c.label, c.model};
        if (std::find(groups.begin(), groups.end(), key) == groups.end()) groups.push_back(key);
    }
    std::vector<ImprovementRow> rows;
    for (const auto& [label, model] : groups) {
        const RmseCell* baseline = nullptr;
        const RmseCell* best = nullptr;
        for (const auto& c : cells) {
            if (c.label != label || c.model != model) continue;
            if (c.combination == "Baseline") baseline = &c;
            if (best == nullptr || c.rmse < best->rmse) best = &c;
        }
        if (baseline == nullptr) continue;
        rows.push_back({label, model, baseline->rmse, best->combination, best->rmse,
                        improvement_percent(baseline->rmse, best->rmse)});
    }
    return rows;
}

std::vector<CorrelationCell> correlation_table(const Corpus& corpus, const std::vector<GraphScores>& scores,
                                               const std::vector<std::string>& labels) {
    std::vector<const Label*> selected;
    if (labels.empty()) {
        for (const auto& l : corpus.labels) selected.push_back(&l);
    } else {
        for (const auto& name : labels) selected.push_back(&corpus.label(name));
    }

    std::vector<CorrelationCell> cells;
    for (const auto& gs : scores) {
        std::vector<std::pair<std::string, const Vector*>> measures{
            {"novelty", &gs.scores.novelty}, {"influence", &gs.scores.influence}, {"aggregate", &gs.scores.aggregate}};
        for (auto m : {UnexpectednessMeasure::max, UnexpectednessMeasure::mean, UnexpectednessMeasure::inverse_weighted})
            measures.emplace_back(fmt::format("unexpectedness_{}", to_string(m)), &gs.unexpected(m).values);

        for (const auto& [name, values] : measures) {
            for (const Label* label : selected) {
                std::vector<double> x;
                std::vector<double> y;
                for (Eigen::Index i = 0; i < values->size(); ++i) {
                    const double v = (*values)[i];
                    const double t = label->values[static_cast<std::size_t>(i)];
                    if (std::isfinite(v) && std::isfinite(t)) {
                        x.push_back(v);
                        y.push_back(t);
                    }
                }
                CorrelationCell cell{gs.attribute, gs.kernel, name, label->name, std::nullopt};
                if (x.size() >= 2) {
                    try {
                        cell.r = pearson(x, y);
                    } catch (const UndefinedCorrelation&) {
                    }
                }
                cells.push_back(std::move(cell));
            }
        }
    }
    return cells;
}

json canonical_json(const BenchmarkConfig& config) {
    json j;
    j["graph"] = {{"alpha", config.graph.alpha},
                  {"beta", config.graph.beta},
                  {"threshold_rule", config.graph.threshold.to_string()},
                  {"tol", config.graph.convergence_tol},
                  {"max_iters", config.graph.max_iterations}};
    j["unexpectedness"] = {{"window_years", config.unexpectedness.window_years},
                           {"measure", std::string(to_string(config.unexpectedness.measure))},
                           {"empty_window_policy", std::string(to_string(config.unexpectedness.empty_window_policy))}};
    j["pca"] = {{"variance_fraction", config.variance_fraction}};
    j["regression"] = {{"lambda", config.lambda},
                       {"k", config.k},
                       {"seed", config.split.seed},
                       {"train_fraction", config.split.train_fraction}};
    j["combinations"] = json::array();
    for (const auto& c : config.combinations) j["combinations"].push_back(c.code);
    j["labels"] = config.labels;
    j["models"] = json::array();
    for (auto m : config.models) j["models"].push_back(std::string(to_string(m)));
    return j;
}

ExperimentReport run_benchmark(const Corpus& corpus, const ValueFeatures& value,
                               const std::vector<GraphScores>& scores, const BenchmarkConfig& config) {
    std::vector<const Label*> labels;
    if (config.labels.empty()) {
        for (const auto& l : corpus.labels) labels.push_back(&l);
    } else {
        for (const auto& name : config.labels) labels.push_back(&corpus.label(name));
    }
    if (labels.empty()) throw ArgumentError("benchmark needs at least one label");
    if (config.combinations.empty()) throw ArgumentError("benchmark needs at least one feature combination");
    const bool uses_unexpectedness =
        std::any_of(config.combinations.begin(), config.combinations.end(),
                    [](const FeatureCombination& c) { return c.includes(FeatureGroup::unexpectedness); });
    if (uses_unexpectedness && config.unexpectedness.empty_window_policy == EmptyWindowPolicy::flag)
        throw ArgumentError("unexpectedness features need the 'zero' empty-window policy");

    std::vector<FeatureMatrix> designs;
    for (const auto& combo : config.combinations)
        designs.push_back(assemble_features(value, scores, config.unexpectedness.measure, combo));

    const auto m = value.matrix.rows();
    const auto indices = split_indices(m, config.split);

    struct Task {
        std::size_t label;
        std::size_t combination;
        ModelKind model;
    };
    std::vector<Task> tasks;
    for (std::size_t l = 0; l < labels.size(); ++l)
        for (std::size_t c = 0; c < config.combinations.size(); ++c)
            for (auto model : config.models) tasks.push_back({l, c, model});

    std::vector<RmseCell> cells(tasks.size());
    std::vector<json> summaries(tasks.size());
    parallel_for(tasks.size(), config.threads, [&](std::size_t t) {
        const auto& task = tasks[t];
        const Label& label = *labels[task.label];
        const auto& combo = config.combinations[task.combination];
        try {
            const auto design =
                make_design(designs[task.combination].values, label.values, label.maximum, designs[task.combination].names);
            const auto train = design.subset(indices.train);
            const auto test = design.subset(indices.test);
            const auto model = fit_model(ModelSpec{task.model, config.lambda, config.k}, train);
            cells[t] = {label.name, combo.code, task.model, rmse(model->predict(test.features), test.labels)};
            summaries[t] = {{"label", label.name}, {"combination", combo.code}, {"model", model->describe()}};
        } catch (const Error& e) {
            throw Error(fmt::format("label '{}', combination {}, model {}: {}", label.name, combo.code,
                                    to_string(task.model), e.what()));
        }
    });

    ExperimentReport report;
    report.rmse = std::move(cells);
    report.improvements = improvement_rows(report.rmse);
    std::vector<std::string> label_names;
    for (const auto* l : labels) label_names.push_back(l->name);
    report.correlations = correlation_table(corpus, scores, label_names);
    for (const auto& gs : scores)
        report.graphs.push_back(
            {gs.key(), gs.scores.iterations_used, gs.scores.converged, gs.fully_dangling, gs.threshold});
    report.models = json(summaries);
    report.seed = config.split.seed;
    report.config_hash = sha256_hex(canonical_json(config).dump());
    return report;
}

ExperimentReport run_benchmark(const Corpus& corpus, const BenchmarkConfig& config) {
    const auto value = pca_value_features(corpus, config.variance_fraction);
    const auto scores = compute_all_scores(corpus, config.graph, config.unexpectedness, config.threads);
    return run_benchmark(corpus, value, scores, config);
}

}  // namespace creativity
