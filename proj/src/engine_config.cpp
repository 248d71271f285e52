#include "creativity/engine_config.hpp"

#include <fstream>
#include <set>

#include <fmt/format.h>

#include "creativity/errors.hpp"

namespace creativity {

using nlohmann::json;

BenchmarkConfig EngineConfig::benchmark_config() const {
    BenchmarkConfig bc;
    bc.graph = graph;
    bc.unexpectedness = unexpectedness;
    bc.variance_fraction = variance_fraction;
    bc.lambda = lambda;
    bc.k = k;
    bc.split = SplitSpec{train_fraction, seed};
    bc.combinations = combinations;
    bc.labels = labels;
    bc.threads = threads;
    return bc;
}

void EngineConfig::validate() const {
    try {
        graph.validate();
        unexpectedness.validate();
    } catch (const ArgumentError& e) {
        throw UsageError(e.what());
    }
    if (!(lambda >= 0.0)) throw UsageError("regression.lambda must be >= 0");
    if (k < 1) throw UsageError("regression.k must be >= 1");
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw UsageError("regression.train_fraction outside (0, 1)");
    if (!(variance_fraction > 0.0 && variance_fraction <= 1.0))
        throw UsageError("pca.variance_fraction outside (0, 1]");
    if (combinations.empty()) throw UsageError("no feature combinations selected");
}

namespace {

void reject_unknown(const json& block, std::initializer_list<std::string_view> known, std::string_view where) {
    if (!block.is_object()) throw UsageError(fmt::format("config '{}' must be an object", where));
    for (const auto& item : block.items()) {
        if (std::find(known.begin(), known.end(), item.key()) == known.end())
            throw UsageError(fmt::format("unknown config key '{}{}'", where.empty() ? "" : std::string(where) + ".",
                                         item.key()));
    }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

}  // namespace

EngineConfig parse_engine_config(const json& doc, const std::filesystem::path& base_dir) {
    EngineConfig c;
    try {
        reject_unknown(doc, {"paths", "graph", "unexpectedness", "regression", "pca", "combinations", "labels", "threads"},
                       "");
        if (doc.contains("paths")) {
            const auto& p = doc["paths"];
            reject_unknown(p, {"schema", "artifacts", "vectors", "cache_dir", "output_dir"}, "paths");
            if (p.contains("schema")) c.paths.schema = resolve(base_dir, p["schema"].get<std::string>());
            if (p.contains("artifacts")) c.paths.artifacts = resolve(base_dir, p["artifacts"].get<std::string>());
            if (p.contains("vectors")) c.paths.vectors = resolve(base_dir, p["vectors"].get<std::string>());
            c.paths.cache_dir = resolve(base_dir, p.value("cache_dir", std::string("cache")));
            c.paths.output_dir = resolve(base_dir, p.value("output_dir", std::string("out")));
        } else {
            c.paths.cache_dir = base_dir / "cache";
            c.paths.output_dir = base_dir / "out";
        }
        if (doc.contains("graph")) {
            const auto& g = doc["graph"];
            reject_unknown(g, {"alpha", "beta", "threshold_rule", "tol", "max_iters"}, "graph");
            c.graph.alpha = g.value("alpha", c.graph.alpha);
            c.graph.beta = g.value("beta", c.graph.beta);
            if (g.contains("threshold_rule")) c.graph.threshold = ThresholdRule::parse(g["threshold_rule"].get<std::string>());
            c.graph.convergence_tol = g.value("tol", c.graph.convergence_tol);
            c.graph.max_iterations = g.value("max_iters", c.graph.max_iterations);
        }
        if (doc.contains("unexpectedness")) {
            const auto& u = doc["unexpectedness"];
            reject_unknown(u, {"window_years", "measure", "empty_window_policy"}, "unexpectedness");
            c.unexpectedness.window_years = u.value("window_years", c.unexpectedness.window_years);
            if (u.contains("measure")) c.unexpectedness.measure = parse_measure(u["measure"].get<std::string>());
            if (u.contains("empty_window_policy"))
                c.unexpectedness.empty_window_policy =
                    parse_empty_window_policy(u["empty_window_policy"].get<std::string>());
        }
        if (doc.contains("regression")) {
            const auto& r = doc["regression"];
            reject_unknown(r, {"lambda", "k", "seed", "train_fraction"}, "regression");
            c.lambda = r.value("lambda", c.lambda);
            c.k = r.value("k", c.k);
            c.seed = r.value("seed", c.seed);
            c.train_fraction = r.value("train_fraction", c.train_fraction);
        }
        if (doc.contains("pca")) {
            const auto& p = doc["pca"];
            reject_unknown(p, {"variance_fraction"}, "pca");
            c.variance_fraction = p.value("variance_fraction", c.variance_fraction);
        }
        if (doc.contains("combinations")) {
            c.combinations.clear();
            for (const auto& code : doc["combinations"])
                c.combinations.push_back(FeatureCombination::parse(code.get<std::string>()));
        }
        if (doc.contains("labels")) c.labels = doc["labels"].get<std::vector<std::string>>();
        c.threads = doc.value("threads", c.threads);
    } catch (const json::exception& e) {
        throw UsageError(fmt::format("config: {}", e.what()));
    } catch (const ArgumentError& e) {
        throw UsageError(fmt::format("config: {}", e.what()));
    }
    c.validate();
    return c;
}

EngineConfig load_engine_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError(fmt::format("cannot open config file {}", path.string()));
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw UsageError(fmt::format("{}: {}", path.string(), e.what()));
    }
    return parse_engine_config(doc, path.parent_path());
}

json to_json(const EngineConfig& c, const std::filesystem::path& base_dir) {
    auto rel = [&](const std::filesystem::path& p) {
        if (p.empty()) return std::string();
        return std::filesystem::path(p).lexically_relative(base_dir).generic_string();
    };
    json j;
    j["paths"] = {{"schema", rel(c.paths.schema)},
                  {"artifacts", rel(c.paths.artifacts)},
                  {"vectors", rel(c.paths.vectors)},
                  {"cache_dir", rel(c.paths.cache_dir)},
                  {"output_dir", rel(c.paths.output_dir)}};
    j["graph"] = {{"alpha", c.graph.alpha},
                  {"beta", c.graph.beta},
                  {"threshold_rule", c.graph.threshold.to_string()},
                  {"tol", c.graph.convergence_tol},
                  {"max_iters", c.graph.max_iterations}};
    j["unexpectedness"] = {{"window_years", c.unexpectedness.window_years},
                           {"measure", std::string(to_string(c.unexpectedness.measure))},
                           {"empty_window_policy", std::string(to_string(c.unexpectedness.empty_window_policy))}};
    j["regression"] = {{"lambda", c.lambda}, {"k", c.k}, {"seed", c.seed}, {"train_fraction", c.train_fraction}};
    j["pca"] = {{"variance_fraction", c.variance_fraction}};
    j["combinations"] = json::array();
    for (const auto& combo : c.combinations) j["combinations"].push_back(combo.code);
    j["labels"] = c.labels;
    return j;
}

}  // namespace creativity
