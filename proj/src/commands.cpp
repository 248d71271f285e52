#include "creativity/commands.hpp"

#include <chrono>
#include <fstream>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "creativity/errors.hpp"
#include "creativity/hashing.hpp"

namespace creativity {

using nlohmann::json;

namespace {

constexpr const char* kIngestVersion = "ingest-v1";
constexpr const char* kScoresVersion = "scores-v1";

std::optional<json> read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    try {
        return json::parse(in);
    } catch (const json::exception&) {
        return std::nullopt;
    }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw Error(fmt::format("cannot write {}", path.string()));
}

json vector_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::isfinite(v[i])) {
            out.push_back(v[i]);
        } else {
            out.push_back(nullptr);
        }
    }
    return out;
}

Vector vector_from_json(const json& j) {
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = j[i].is_null() ? std::numeric_limits<double>::quiet_NaN() : j[i].get<double>();
    return v;
}

void require_inputs(const EngineConfig& config) {
    if (config.paths.schema.empty()) throw UsageError("config is missing paths.schema");
    if (config.paths.artifacts.empty()) throw UsageError("config is missing paths.artifacts");
    if (config.paths.vectors.empty()) throw UsageError("config is missing paths.vectors");
}

std::string file_safe(std::string_view name) {
    std::string out;
    for (char c : name) out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_');
    return out;
}

json graph_json(const GraphConfig& g) {
    return {{"alpha", g.alpha},
            {"beta", g.beta},
            {"threshold_rule", g.threshold.to_string()},
            {"tol", g.convergence_tol},
            {"max_iters", g.max_iterations}};
}

json unexpectedness_json(const UnexpectednessConfig& u) {
    // The measure only selects a feature column; all three are always computed.
    return {{"window_years", u.window_years}, {"empty_window_policy", std::string(to_string(u.empty_window_policy))}};
}

json graph_scores_json(const GraphScores& gs) {
    json j;
    j["attribute"] = gs.attribute;
    j["kernel"] = std::string(to_string(gs.kernel));
    j["threshold"] = gs.threshold;
    j["fully_dangling"] = gs.fully_dangling;
    j["iterations"] = gs.scores.iterations_used;
    j["converged"] = gs.scores.converged;
    j["dangling_share"] = gs.scores.dangling_share;
    j["novelty"] = vector_json(gs.scores.novelty);
    j["influence"] = vector_json(gs.scores.influence);
    j["aggregate"] = vector_json(gs.scores.aggregate);
    j["unexpectedness"] = json::array();
    for (const auto& u : gs.unexpectedness)
        j["unexpectedness"].push_back({{"values", vector_json(u.values)}, {"empty_window", u.empty_window}});
    return j;
}

GraphScores graph_scores_from_json(const json& j) {
    GraphScores gs;
    gs.attribute = j.at("attribute").get<std::string>();
    gs.kernel = parse_kernel(j.at("kernel").get<std::string>());
    gs.threshold = j.at("threshold").get<double>();
    gs.fully_dangling = j.at("fully_dangling").get<bool>();
    gs.scores.iterations_used = j.at("iterations").get<int>();
    gs.scores.converged = j.at("converged").get<bool>();
    gs.scores.dangling_share = j.at("dangling_share").get<double>();
    gs.scores.novelty = vector_from_json(j.at("novelty"));
    gs.scores.influence = vector_from_json(j.at("influence"));
    gs.scores.aggregate = vector_from_json(j.at("aggregate"));
    for (const auto& u : j.at("unexpectedness"))
        gs.unexpectedness.push_back({vector_from_json(u.at("values")), u.at("empty_window").get<std::vector<bool>>()});
    return gs;
}

json convergence_json(const std::vector<GraphScores>& scores) {
    json graphs = json::array();
    for (const auto& gs : scores)
        graphs.push_back({{"graph", gs.key()},
                          {"iterations", gs.scores.iterations_used},
                          {"converged", gs.scores.converged},
                          {"fully_dangling", gs.fully_dangling},
                          {"threshold", gs.threshold}});
    return graphs;
}

void check_convergence(const EngineConfig& config, const std::vector<GraphScores>& scores, std::ostream& log) {
    std::vector<std::string> failed;
    for (const auto& gs : scores)
        if (!gs.scores.converged) failed.push_back(gs.key());
    if (failed.empty()) return;
    const auto message = fmt::format("power iteration did not converge for {} graph(s): {}", failed.size(),
                                     fmt::join(failed, ", "));
    if (config.strict) throw NumericError(message);
    log << "warning: " << message << '\n';
}

void write_score_files(const EngineConfig& config, const ScoresOutcome& outcome) {
    const auto& dir = config.paths.output_dir;
    const auto ids = outcome.ingest.corpus.ids();
    std::string scores = "id,attribute,kernel,novelty,influence,aggregate\n";
    std::string unexpected = "id,attribute,kernel,measure,unexpectedness,empty_window\n";
    for (const auto& gs : outcome.scores) {
        const auto kernel = to_string(gs.kernel);
        for (std::size_t i = 0; i < ids.size(); ++i) {
            const auto r = static_cast<Eigen::Index>(i);
            scores += fmt::format("{},{},{},{},{},{}\n", ids[i], gs.attribute, kernel,
                                  format_real(gs.scores.novelty[r]), format_real(gs.scores.influence[r]),
                                  format_real(gs.scores.aggregate[r]));
        }
        for (auto measure :
             {UnexpectednessMeasure::max, UnexpectednessMeasure::mean, UnexpectednessMeasure::inverse_weighted}) {
            const auto& u = gs.unexpected(measure);
            for (std::size_t i = 0; i < ids.size(); ++i) {
                const double v = u.values[static_cast<Eigen::Index>(i)];
                unexpected += fmt::format("{},{},{},{},{},{}\n", ids[i], gs.attribute, kernel, to_string(measure),
                                          std::isfinite(v) ? format_real(v) : "", u.empty_window[i] ? 1 : 0);
            }
        }
    }
    write_text(dir / "scores.csv", scores);
    write_text(dir / "unexpectedness.csv", unexpected);
    json manifest;
    manifest["corpus_hash"] = outcome.ingest.corpus_hash;
    manifest["scores_hash"] = outcome.scores_hash;
    manifest["graph"] = graph_json(config.graph);
    manifest["unexpectedness"] = unexpectedness_json(config.unexpectedness);
    manifest["graphs"] = convergence_json(outcome.scores);
    write_text(dir / "scores_manifest.json", manifest.dump(2) + "\n");
}

}  // namespace

// ---------------------------------------------------------------------------

json corpus_to_json(const Corpus& corpus) {
    json j;
    j["attributes"] = json::array();
    for (const auto& a : corpus.attributes)
        j["attributes"].push_back({{"name", a.name},
                                   {"kind", std::string(to_string(a.kind))},
                                   {"dimension", a.dimension},
                                   {"similarity", std::string(to_string(a.similarity_kind))}});
    j["artifacts"] = json::array();
    for (const auto& a : corpus.artifacts) {
        json values = json::array();
        for (const auto& v : a.values) {
            if (const auto* x = std::get_if<double>(&v)) {
                values.push_back(*x);
            } else if (const auto* vec = std::get_if<std::vector<double>>(&v)) {
                values.push_back(*vec);
            } else {
                values.push_back(nullptr);
            }
        }
        j["artifacts"].push_back({{"id", a.id}, {"year", a.year}, {"values", std::move(values)}});
    }
    j["labels"] = json::array();
    for (const auto& l : corpus.labels)
        j["labels"].push_back({{"name", l.name}, {"max", l.maximum}, {"values", l.values}});
    return j;
}

Corpus corpus_from_json(const json& j) {
    Corpus corpus;
    for (const auto& a : j.at("attributes"))
        corpus.attributes.push_back({a.at("name").get<std::string>(), parse_attribute_kind(a.at("kind").get<std::string>()),
                                     a.at("dimension").get<std::size_t>(),
                                     parse_kernel(a.at("similarity").get<std::string>())});
    for (const auto& a : j.at("artifacts")) {
        ArtifactRecord record{a.at("id").get<std::string>(), a.at("year").get<int>(), {}};
        for (const auto& v : a.at("values")) {
            if (v.is_null()) {
                record.values.emplace_back(Missing{});
            } else if (v.is_array()) {
                record.values.emplace_back(v.get<std::vector<double>>());
            } else {
                record.values.emplace_back(v.get<double>());
            }
        }
        corpus.artifacts.push_back(std::move(record));
    }
    for (const auto& l : j.at("labels"))
        corpus.labels.push_back({l.at("name").get<std::string>(), l.at("max").get<double>(),
                                 l.at("values").get<std::vector<double>>()});
    corpus.validate();
    return corpus;
}

IngestOutcome cmd_ingest(const EngineConfig& config, std::ostream& log) {
    require_inputs(config);
    const auto input_hash = sha256_hex(fmt::format("{}|{}|{}|{}", kIngestVersion, sha256_file(config.paths.schema),
                                                   sha256_file(config.paths.artifacts),
                                                   sha256_file(config.paths.vectors)));
    const auto cache_path = config.paths.cache_dir / "corpus.json";
    IngestOutcome out;
    out.corpus_hash = input_hash;

    if (auto cached = read_json(cache_path); cached && cached->value("input_hash", "") == input_hash) {
        try {
            out.corpus = corpus_from_json(cached->at("corpus"));
            const auto& r = cached->at("load_report");
            out.report = {r.at("rows_read").get<std::size_t>(), r.at("dropped_missing_year").get<std::size_t>(),
                          r.at("dropped_missing_label").get<std::size_t>()};
            out.cache_reused = true;
        } catch (const std::exception&) {
            out.cache_reused = false;
        }
    }
    if (!out.cache_reused) {
        const auto schema = load_schema(config.paths.schema);
        auto loaded = load_corpus(config.paths.artifacts, config.paths.vectors, schema);
        out.report = loaded.report;
        out.corpus = normalize_numeric(impute(std::move(loaded.corpus)));
        out.corpus.validate();
        json cache;
        cache["input_hash"] = input_hash;
        cache["load_report"] = {{"rows_read", out.report.rows_read},
                                {"dropped_missing_year", out.report.dropped_missing_year},
                                {"dropped_missing_label", out.report.dropped_missing_label}};
        cache["corpus"] = corpus_to_json(out.corpus);
        write_text(cache_path, cache.dump() + "\n");
    }
    log << fmt::format("ingest: {} artifacts, {} attributes, {} labels; dropped {} (missing year), {} (missing label); "
                       "cache {}\n",
                       out.corpus.size(), out.corpus.attributes.size(), out.corpus.labels.size(),
                       out.report.dropped_missing_year, out.report.dropped_missing_label,
                       out.cache_reused ? "reused" : "written");
    return out;
}

ScoresOutcome cmd_scores(const EngineConfig& config, std::ostream& log) {
    ScoresOutcome out;
    out.ingest = cmd_ingest(config, log);
    const auto& corpus = out.ingest.corpus;
    out.scores_hash = sha256_hex(fmt::format("{}|{}|{}|{}", kScoresVersion, out.ingest.corpus_hash,
                                             graph_json(config.graph).dump(),
                                             unexpectedness_json(config.unexpectedness).dump()));
    const auto cache_path = config.paths.cache_dir / "scores.json";
    if (auto cached = read_json(cache_path); cached && cached->value("scores_hash", "") == out.scores_hash) {
        try {
            for (const auto& g : cached->at("graphs")) out.scores.push_back(graph_scores_from_json(g));
            out.cache_reused = true;
        } catch (const std::exception&) {
            out.scores.clear();
        }
    }

    if (!out.cache_reused) {
        // Similarity matrices depend only on the corpus, so they survive config changes.
        const auto sim_dir = config.paths.cache_dir / "similarity";
        std::vector<SimilarityMatrix> sims;
        const auto sim_manifest = read_json(sim_dir / "manifest.json");
        if (sim_manifest && sim_manifest->value("corpus_hash", "") == out.ingest.corpus_hash) {
            try {
                for (const auto& entry : sim_manifest->at("matrices")) {
                    SimilarityMatrix s{entry.at("attribute").get<std::string>(),
                                       parse_kernel(entry.at("kernel").get<std::string>()),
                                       load_similarity_matrix(sim_dir / entry.at("file").get<std::string>())};
                    if (s.size() != static_cast<Eigen::Index>(corpus.size())) throw Error("stale similarity cache");
                    sims.push_back(std::move(s));
                }
            } catch (const std::exception&) {
                sims.clear();
            }
        }
        if (sims.empty()) {
            sims = compute_all_similarities(corpus, config.threads);
            std::filesystem::create_directories(sim_dir);
            json manifest;
            manifest["corpus_hash"] = out.ingest.corpus_hash;
            manifest["matrices"] = json::array();
            for (const auto& s : sims) {
                const auto file = fmt::format("{}__{}.csim", file_safe(s.attribute), to_string(s.kernel));
                save_similarity_matrix(sim_dir / file, s.values);
                manifest["matrices"].push_back(
                    {{"attribute", s.attribute}, {"kernel", std::string(to_string(s.kernel))}, {"file", file}});
            }
            write_text(sim_dir / "manifest.json", manifest.dump(2) + "\n");
        }
        const auto times = corpus.years();
        out.scores = scores_from_similarities(sims, times, config.graph, config.unexpectedness, config.threads);
        json cache;
        cache["scores_hash"] = out.scores_hash;
        cache["graphs"] = json::array();
        for (const auto& gs : out.scores) cache["graphs"].push_back(graph_scores_json(gs));
        write_text(cache_path, cache.dump() + "\n");
    }

    write_score_files(config, out);
    std::size_t converged = 0;
    for (const auto& gs : out.scores) converged += gs.scores.converged ? 1 : 0;
    log << fmt::format("scores: {} graphs ({} converged); cache {}\n", out.scores.size(), converged,
                       out.cache_reused ? "reused" : "written");
    check_convergence(config, out.scores, log);
    return out;
}

ExperimentReport cmd_benchmark(const EngineConfig& config, std::ostream& log) {
    const auto started = std::chrono::steady_clock::now();
    auto scored = cmd_scores(config, log);
    const auto scores_done = std::chrono::steady_clock::now();
    const auto bc = config.benchmark_config();
    const auto value = pca_value_features(scored.ingest.corpus, bc.variance_fraction);
    auto report = run_benchmark(scored.ingest.corpus, value, scored.scores, bc);
    report.config_hash = sha256_hex(canonical_json(bc).dump() + "|" + scored.ingest.corpus_hash);
    const auto finished = std::chrono::steady_clock::now();

    const auto& dir = config.paths.output_dir;
    write_report(dir, report);
    json manifest;
    manifest["config_hash"] = report.config_hash;
    manifest["seed"] = report.seed;
    manifest["corpus_hash"] = scored.ingest.corpus_hash;
    manifest["scores_hash"] = scored.scores_hash;
    manifest["config"] = canonical_json(bc);
    manifest["value_features"] = value.matrix.cols();
    manifest["graphs"] = convergence_json(scored.scores);
    manifest["all_converged"] = report.all_converged();
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");
    // Wall-clock numbers live apart from the manifest so reruns stay byte-identical.
    using seconds = std::chrono::duration<double>;
    json timings{{"scores_seconds", seconds(scores_done - started).count()},
                 {"benchmark_seconds", seconds(finished - scores_done).count()}};
    write_text(dir / "timings.json", timings.dump(2) + "\n");

    for (const auto& row : report.improvements)
        log << fmt::format("benchmark: {} {}: baseline {:.5f}, best {} {:.5f} ({:.3f}% better)\n", row.label,
                           to_string(row.model), row.baseline_rmse, row.best_combination, row.best_rmse,
                           row.improvement_percent);
    log << fmt::format("benchmark: {} RMSE cells written to {}\n", report.rmse.size(), dir.string());
    check_convergence(config, scored.scores, log);
    return report;
}

std::vector<CorrelationCell> cmd_correlate(const EngineConfig& config, std::ostream& log) {
    auto scored = cmd_scores(config, log);
    auto cells = correlation_table(scored.ingest.corpus, scored.scores, config.labels);
    write_correlations_csv(config.paths.output_dir / "correlations.csv", cells);
    write_heatmaps(config.paths.output_dir, cells);
    log << fmt::format("correlate: {} cells written to {}\n", cells.size(), config.paths.output_dir.string());
    return cells;
}

void cmd_synth(const SynthRequest& request, const EngineConfig& engine, std::ostream& log) {
    SyntheticOptions options;
    options.graph = engine.graph;
    options.unexpectedness = engine.unexpectedness;
    const auto corpus = generate_synthetic_corpus(request.m, request.attributes, request.seed, request.rule, options);
    write_corpus_files(corpus, request.output_dir);

    EngineConfig config = engine;
    config.paths.schema = request.output_dir / "schema.json";
    config.paths.artifacts = request.output_dir / "artifacts.csv";
    config.paths.vectors = request.output_dir / "vectors.jsonl";
    config.paths.cache_dir = request.output_dir / "cache";
    config.paths.output_dir = request.output_dir / "out";
    write_text(request.output_dir / "config.json", to_json(config, request.output_dir).dump(2) + "\n");
    log << fmt::format("synth: {} artifacts, {} attributes, labels {} -> {}\n", corpus.size(),
                       corpus.attributes.size(), to_string(request.rule), request.output_dir.string());
}

}  // namespace creativity
