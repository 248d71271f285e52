#include <cmath>
#include <fstream>
#include <random>

#include <fmt/format.h>

#include "creativity/errors.hpp"
#include "creativity/experiments.hpp"

namespace creativity {

using nlohmann::json;

LabelRule parse_label_rule(std::string_view text) {
    if (text == "value_only") return LabelRule::value_only;
    if (text == "novelty_driven") return LabelRule::novelty_driven;
    if (text == "unexpectedness_driven") return LabelRule::unexpectedness_driven;
    throw ArgumentError(fmt::format("unknown label rule '{}'", text));
}

std::string_view to_string(LabelRule rule) {
    switch (rule) {
        case LabelRule::value_only: return "value_only";
        case LabelRule::novelty_driven: return "novelty_driven";
        case LabelRule::unexpectedness_driven: return "unexpectedness_driven";
    }
    return "unknown";
}

namespace {

Vector zscore(const Vector& v) {
    const double mean = v.mean();
    const double sd = std::sqrt((v.array() - mean).square().mean());
    if (!(sd > 0.0)) return Vector::Zero(v.size());
    return (v.array() - mean) / sd;
}

}  // namespace

Corpus generate_synthetic_corpus(std::size_t m, std::size_t attributes, std::uint64_t seed, LabelRule rule,
                                 const SyntheticOptions& options) {
    if (m < 10) throw ArgumentError("synthetic corpora need at least 10 artifacts");
    if (attributes < 1) throw ArgumentError("synthetic corpora need at least one attribute");
    if (options.year_span < 1 || options.styles < 1 || options.vector_dimension < 1)
        throw ArgumentError("invalid synthetic corpus options");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    Corpus corpus;
    for (std::size_t k = 0; k < attributes; ++k) {
        if (k % 2 == 0) {
            corpus.attributes.push_back({fmt::format("num_{}", k), AttributeKind::numeric, 1, Kernel::linear});
        } else {
            corpus.attributes.push_back(
                {fmt::format("vec_{}", k), AttributeKind::vector, options.vector_dimension, Kernel::cosine});
        }
    }

    // Each vector attribute has a few styles whose popularity peaks at different times.
    std::vector<std::vector<Vector>> centers(attributes);
    for (std::size_t k = 1; k < attributes; k += 2) {
        for (std::size_t s = 0; s < options.styles; ++s) {
            Vector c(static_cast<Eigen::Index>(options.vector_dimension));
            for (auto& x : c) x = normal(rng);
            centers[k].push_back(c);
        }
    }
    const double style_width = static_cast<double>(options.year_span) / static_cast<double>(options.styles);

    for (std::size_t i = 0; i < m; ++i) {
        ArtifactRecord record;
        record.id = fmt::format("a{:05}", i);
        record.year = options.first_year + static_cast<int>(unit(rng) * options.year_span);
        const double offset = static_cast<double>(record.year - options.first_year);
        for (std::size_t k = 0; k < attributes; ++k) {
            const bool missing = unit(rng) < options.missing_rate;
            if (corpus.attributes[k].kind == AttributeKind::numeric) {
                const double value = 10.0 + 3.0 * normal(rng);
                record.values.push_back(missing ? AttributeValue{Missing{}} : AttributeValue{value});
                continue;
            }
            std::vector<double> weights;
            for (std::size_t s = 0; s < options.styles; ++s) {
                const double peak = (static_cast<double>(s) + 0.5) * style_width;
                const double z = (offset - peak) / style_width;
                weights.push_back(std::exp(-z * z) + 0.1);
            }
            std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
            const auto& center = centers[k][pick(rng)];
            std::vector<double> vec(options.vector_dimension);
            for (std::size_t d = 0; d < vec.size(); ++d) vec[d] = center[static_cast<Eigen::Index>(d)] + 0.6 * normal(rng);
            record.values.push_back(missing ? AttributeValue{Missing{}} : AttributeValue{std::move(vec)});
        }
        corpus.artifacts.push_back(std::move(record));
    }

    const Corpus engine = normalize_numeric(impute(corpus));
    Vector value = Vector::Zero(static_cast<Eigen::Index>(m));
    for (std::size_t k = 0; k < attributes; k += 2) {
        const double w = (unit(rng) < 0.5 ? -1.0 : 1.0) * (0.5 + 0.5 * unit(rng));
        value += w * numeric_column(engine, k);
    }

    Vector raw = zscore(value);
    if (rule != LabelRule::value_only) {
        const auto scores = compute_all_scores(engine, options.graph, options.unexpectedness);
        Vector driver = Vector::Zero(static_cast<Eigen::Index>(m));
        for (const auto& gs : scores) {
            const double w = (unit(rng) < 0.5 ? -1.0 : 1.0) * (0.5 + 0.5 * unit(rng));
            const Vector& column = rule == LabelRule::novelty_driven
                                       ? gs.scores.novelty
                                       : gs.unexpected(options.unexpectedness.measure).values;
            driver += w * zscore(column);
        }
        raw = zscore(driver) + 0.3 * raw;
    }
    raw = zscore(raw);

    Label label{"rating", 1.0, {}};
    for (std::size_t i = 0; i < m; ++i) {
        const double y = 0.5 + 0.15 * raw[static_cast<Eigen::Index>(i)] + options.noise * normal(rng);
        label.values.push_back(std::clamp(y, 0.0, 1.0));
    }
    corpus.labels.push_back(std::move(label));
    return corpus;
}

void write_corpus_files(const Corpus& corpus, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    json schema;
    schema["attributes"] = json::array();
    for (const auto& a : corpus.attributes)
        schema["attributes"].push_back({{"name", a.name},
                                        {"kind", std::string(to_string(a.kind))},
                                        {"dimension", a.dimension},
                                        {"similarity", std::string(to_string(a.similarity_kind))}});
    schema["labels"] = json::array();
    for (const auto& l : corpus.labels) schema["labels"].push_back({{"name", l.name}, {"max", l.maximum}});
    std::ofstream(dir / "schema.json") << schema.dump(2) << '\n';

    std::ofstream table(dir / "artifacts.csv", std::ios::binary);
    table << "id,year";
    for (const auto& a : corpus.attributes)
        if (a.kind == AttributeKind::numeric) table << ',' << a.name;
    for (const auto& l : corpus.labels) table << ',' << l.name;
    table << '\n';
    std::ofstream vectors(dir / "vectors.jsonl", std::ios::binary);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& record = corpus.artifacts[i];
        table << record.id << ',' << record.year;
        for (std::size_t k = 0; k < corpus.attributes.size(); ++k) {
            const auto& v = record.values[k];
            if (corpus.attributes[k].kind == AttributeKind::numeric) {
                table << ',';
                if (const auto* x = std::get_if<double>(&v)) table << format_real(*x);
            } else if (const auto* vec = std::get_if<std::vector<double>>(&v)) {
                vectors << json{{"id", record.id}, {"attribute", corpus.attributes[k].name}, {"vector", *vec}}.dump()
                        << '\n';
            }
        }
        for (const auto& l : corpus.labels) table << ',' << format_real(l.values[i]);
        table << '\n';
    }
    if (!table || !vectors) throw Error(fmt::format("failed writing corpus files to {}", dir.string()));
}

}  // namespace creativity
