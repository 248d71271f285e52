#include "creativity/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>
#include "json.hpp"

#include "creativity/errors.hpp"

namespace creativity {

using json = nlohmann::json;

std::string_view to_string(AttributeKind kind) {
    return kind == AttributeKind::numeric ? "numeric" : "vector";
}

std::string_view to_string(Kernel kernel) {
    switch (kernel) {
        case Kernel::linear: return "linear";
        case Kernel::exponential: return "exponential";
        case Kernel::cosine: return "cosine";
    }
    return "unknown";
}

AttributeKind parse_attribute_kind(std::string_view text) {
    if (text == "numeric") return AttributeKind::numeric;
    if (text == "vector") return AttributeKind::vector;
    throw SchemaError(fmt::format("unknown attribute kind '{}'", text));
}

Kernel parse_kernel(std::string_view text) {
    if (text == "linear" || text == "lin") return Kernel::linear;
    if (text == "exponential" || text == "exp") return Kernel::exponential;
    if (text == "cosine" || text == "cos") return Kernel::cosine;
    throw SchemaError(fmt::format("unknown similarity kernel '{}'", text));
}

void AttributeSpec::validate() const {
    if (name.empty()) throw SchemaError("attribute with empty name");
    if (dimension < 1) throw SchemaError(fmt::format("attribute '{}': dimension must be >= 1", name));
    if (kind == AttributeKind::numeric && dimension != 1)
        throw SchemaError(fmt::format("attribute '{}': numeric attributes have dimension 1", name));
    const bool scalar_kernel = similarity_kind != Kernel::cosine;
    if (scalar_kernel != (kind == AttributeKind::numeric))
        throw SchemaError(fmt::format("attribute '{}': kernel {} is incompatible with kind {}", name,
                                      to_string(similarity_kind), to_string(kind)));
}

std::vector<Kernel> AttributeSpec::kernels() const {
    if (kind == AttributeKind::numeric) return {Kernel::linear, Kernel::exponential};
    return {Kernel::cosine};
}

std::size_t Corpus::attribute_index(std::string_view name) const {
    for (std::size_t k = 0; k < attributes.size(); ++k)
        if (attributes[k].name == name) return k;
    throw SchemaError(fmt::format("unknown attribute '{}'", name));
}

const Label& Corpus::label(std::string_view name) const {
    for (const auto& l : labels)
        if (l.name == name) return l;
    throw SchemaError(fmt::format("unknown label '{}'", name));
}

std::vector<int> Corpus::years() const {
    std::vector<int> out;
    out.reserve(artifacts.size());
    for (const auto& a : artifacts) out.push_back(a.year);
    return out;
}

std::vector<std::string> Corpus::ids() const {
    std::vector<std::string> out;
    out.reserve(artifacts.size());
    for (const auto& a : artifacts) out.push_back(a.id);
    return out;
}

bool Corpus::has_missing() const {
    for (const auto& a : artifacts)
        for (const auto& v : a.values)
            if (is_missing(v)) return true;
    return false;
}

void Corpus::validate() const {
    for (const auto& spec : attributes) spec.validate();
    std::unordered_set<std::string> seen;
    for (const auto& a : artifacts) {
        if (!seen.insert(a.id).second) throw IntegrityError(fmt::format("duplicate artifact id '{}'", a.id));
        if (a.values.size() != attributes.size())
            throw SchemaError(fmt::format("artifact '{}' has {} values, expected {}", a.id, a.values.size(),
                                          attributes.size()));
        for (std::size_t k = 0; k < attributes.size(); ++k) {
            const auto& v = a.values[k];
            if (is_missing(v)) continue;
            if (attributes[k].kind == AttributeKind::numeric) {
                if (!std::holds_alternative<double>(v))
                    throw SchemaError(fmt::format("artifact '{}': attribute '{}' expects a scalar", a.id,
                                                  attributes[k].name));
            } else {
                const auto* vec = std::get_if<std::vector<double>>(&v);
                if (vec == nullptr || vec->size() != attributes[k].dimension)
                    throw SchemaError(fmt::format("artifact '{}': attribute '{}' expects a vector of length {}",
                                                  a.id, attributes[k].name, attributes[k].dimension));
            }
        }
    }
    for (const auto& l : labels)
        if (l.values.size() != artifacts.size())
            throw SchemaError(fmt::format("label '{}' has {} values for {} artifacts", l.name, l.values.size(),
                                          artifacts.size()));
}

// ---------------------------------------------------------------------------
// Schema

namespace {

AttributeSpec attribute_from_json(const json& j) {
    AttributeSpec spec;
    spec.name = j.at("name").get<std::string>();
    spec.kind = parse_attribute_kind(j.at("kind").get<std::string>());
    spec.dimension = j.value("dimension", std::size_t{1});
    if (j.contains("similarity")) {
        spec.similarity_kind = parse_kernel(j.at("similarity").get<std::string>());
    } else {
        spec.similarity_kind = spec.kind == AttributeKind::numeric ? Kernel::linear : Kernel::cosine;
    }
    spec.validate();
    return spec;
}

}  // namespace

Schema parse_schema(std::istream& in, const std::string& source) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(source, 1, e.what());
    }
    Schema schema;
    try {
        const json& attrs = doc.is_array() ? doc : doc.at("attributes");
        for (const auto& a : attrs) schema.attributes.push_back(attribute_from_json(a));
        if (doc.is_object() && doc.contains("labels")) {
            for (const auto& l : doc.at("labels")) {
                LabelSpec label{l.at("name").get<std::string>(), l.value("max", 1.0)};
                if (!(label.maximum > 0.0) || !std::isfinite(label.maximum))
                    throw SchemaError(fmt::format("label '{}': max must be positive", label.name));
                schema.labels.push_back(std::move(label));
            }
        }
    } catch (const json::exception& e) {
        throw SchemaError(fmt::format("{}: {}", source, e.what()));
    }
    std::set<std::string> names;
    for (const auto& a : schema.attributes)
        if (!names.insert(a.name).second) throw SchemaError(fmt::format("duplicate attribute '{}'", a.name));
    for (const auto& l : schema.labels)
        if (!names.insert(l.name).second) throw SchemaError(fmt::format("duplicate column name '{}'", l.name));
    return schema;
}

Schema load_schema(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string(), 0, "cannot open schema file");
    return parse_schema(in, path.string());
}

// ---------------------------------------------------------------------------
// Ingest

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv_line(std::string_view line, const std::string& source, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(trim(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    if (quoted) throw ParseError(source, line_no, "unterminated quoted field");
    fields.push_back(trim(current));
    return fields;
}

double parse_real(const std::string& text, const std::string& source, std::size_t line_no,
                  std::string_view column) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value))
        throw ParseError(source, line_no, fmt::format("column '{}': '{}' is not a finite number", column, text));
    return value;
}

int parse_year(const std::string& text, const std::string& source, std::size_t line_no) {
    int value = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end)
        throw ParseError(source, line_no, fmt::format("year '{}' is not an integer", text));
    return value;
}

}  // namespace

LoadResult load_corpus(std::istream& artifact_table, std::istream& vector_store, const Schema& schema,
                       const std::string& table_name, const std::string& vectors_name) {
    for (const auto& a : schema.attributes) a.validate();

    LoadResult result;
    Corpus& corpus = result.corpus;
    corpus.attributes = schema.attributes;
    for (const auto& l : schema.labels) corpus.labels.push_back(Label{l.name, l.maximum, {}});

    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(artifact_table, line)) {
        ++line_no;
        if (!trim(line).empty()) {
            header = split_csv_line(line, table_name, line_no);
            break;
        }
    }
    if (header.size() < 2 || header[0] != "id" || header[1] != "year")
        throw ParseError(table_name, line_no, "header must start with 'id,year'");

    std::unordered_map<std::string, std::size_t> column_of;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (!column_of.emplace(header[c], c).second)
            throw ParseError(table_name, line_no, fmt::format("duplicate column '{}'", header[c]));
    }
    std::vector<std::optional<std::size_t>> attribute_column(schema.attributes.size());
    for (std::size_t k = 0; k < schema.attributes.size(); ++k) {
        if (schema.attributes[k].kind != AttributeKind::numeric) continue;
        auto it = column_of.find(schema.attributes[k].name);
        if (it == column_of.end())
            throw SchemaError(
                fmt::format("{}: numeric attribute '{}' has no column", table_name, schema.attributes[k].name));
        attribute_column[k] = it->second;
    }
    std::vector<std::size_t> label_column;
    for (const auto& l : schema.labels) {
        auto it = column_of.find(l.name);
        if (it == column_of.end())
            throw SchemaError(fmt::format("{}: label '{}' has no column", table_name, l.name));
        label_column.push_back(it->second);
    }

    std::unordered_set<std::string> all_ids;
    std::unordered_set<std::string> dropped_ids;
    std::unordered_map<std::string, std::size_t> index_of;
    while (std::getline(artifact_table, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line, table_name, line_no);
        if (fields.size() != header.size())
            throw ParseError(table_name, line_no,
                             fmt::format("expected {} fields, found {}", header.size(), fields.size()));
        ++result.report.rows_read;
        const std::string& id = fields[0];
        if (id.empty()) throw ParseError(table_name, line_no, "empty artifact id");
        if (!all_ids.insert(id).second)
            throw IntegrityError(fmt::format("{}:{}: duplicate artifact id '{}'", table_name, line_no, id));

        if (fields[1].empty()) {
            ++result.report.dropped_missing_year;
            dropped_ids.insert(id);
            continue;
        }
        ArtifactRecord record;
        record.id = id;
        record.year = parse_year(fields[1], table_name, line_no);
        record.values.assign(schema.attributes.size(), Missing{});
        for (std::size_t k = 0; k < schema.attributes.size(); ++k) {
            if (!attribute_column[k]) continue;
            const auto& cell = fields[*attribute_column[k]];
            if (!cell.empty()) record.values[k] = parse_real(cell, table_name, line_no, schema.attributes[k].name);
        }
        std::vector<double> label_values;
        bool label_missing = false;
        for (std::size_t l = 0; l < label_column.size(); ++l) {
            const auto& cell = fields[label_column[l]];
            if (cell.empty()) {
                label_missing = true;
                break;
            }
            label_values.push_back(parse_real(cell, table_name, line_no, schema.labels[l].name));
        }
        if (label_missing) {
            ++result.report.dropped_missing_label;
            dropped_ids.insert(id);
            continue;
        }
        for (std::size_t l = 0; l < label_values.size(); ++l) corpus.labels[l].values.push_back(label_values[l]);
        index_of.emplace(id, corpus.artifacts.size());
        corpus.artifacts.push_back(std::move(record));
    }

    std::set<std::pair<std::string, std::string>> seen_pairs;
    line_no = 0;
    while (std::getline(vector_store, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        json row;
        try {
            row = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(vectors_name, line_no, e.what());
        }
        std::string id;
        std::string attribute;
        std::vector<double> values;
        try {
            id = row.at("id").get<std::string>();
            attribute = row.at("attribute").get<std::string>();
            values = row.at("vector").get<std::vector<double>>();
        } catch (const json::exception& e) {
            throw ParseError(vectors_name, line_no, e.what());
        }
        if (!seen_pairs.emplace(id, attribute).second)
            throw IntegrityError(
                fmt::format("{}:{}: duplicate vector for ('{}', '{}')", vectors_name, line_no, id, attribute));
        std::size_t k = schema.attributes.size();
        for (std::size_t a = 0; a < schema.attributes.size(); ++a)
            if (schema.attributes[a].name == attribute) k = a;
        if (k == schema.attributes.size())
            throw SchemaError(fmt::format("{}:{}: unknown attribute '{}'", vectors_name, line_no, attribute));
        const auto& spec = schema.attributes[k];
        if (spec.kind != AttributeKind::vector)
            throw SchemaError(fmt::format("{}:{}: attribute '{}' is numeric", vectors_name, line_no, attribute));
        if (values.size() != spec.dimension)
            throw SchemaError(fmt::format("{}:{}: attribute '{}' expects {} components, found {}", vectors_name,
                                          line_no, attribute, spec.dimension, values.size()));
        auto it = index_of.find(id);
        if (it == index_of.end()) {
            if (dropped_ids.contains(id)) continue;
            throw IntegrityError(fmt::format("{}:{}: unknown artifact id '{}'", vectors_name, line_no, id));
        }
        corpus.artifacts[it->second].values[k] = std::move(values);
    }
    return result;
}

LoadResult load_corpus(const std::filesystem::path& artifact_table, const std::filesystem::path& vector_store,
                       const Schema& schema) {
    std::ifstream table(artifact_table);
    if (!table) throw ParseError(artifact_table.string(), 0, "cannot open artifact table");
    std::ifstream vectors(vector_store);
    if (!vectors) throw ParseError(vector_store.string(), 0, "cannot open vector store");
    return load_corpus(table, vectors, schema, artifact_table.string(), vector_store.string());
}

// ---------------------------------------------------------------------------
// Imputation and normalization

Corpus impute(Corpus corpus) {
    for (std::size_t k = 0; k < corpus.attributes.size(); ++k) {
        const auto& spec = corpus.attributes[k];
        if (spec.kind == AttributeKind::numeric) {
            double sum = 0.0;
            std::size_t observed = 0;
            for (const auto& a : corpus.artifacts) {
                if (const auto* v = std::get_if<double>(&a.values[k])) {
                    sum += *v;
                    ++observed;
                }
            }
            const bool any_missing = observed != corpus.artifacts.size();
            if (!any_missing) continue;
            if (observed == 0)
                throw ImputationError(fmt::format("attribute '{}' has no observed values", spec.name));
            const double mean = sum / static_cast<double>(observed);
            for (auto& a : corpus.artifacts)
                if (is_missing(a.values[k])) a.values[k] = mean;
        } else {
            for (auto& a : corpus.artifacts)
                if (is_missing(a.values[k])) a.values[k] = std::vector<double>(spec.dimension, 0.0);
        }
    }
    return corpus;
}

Corpus normalize_numeric(Corpus corpus) {
    const auto m = corpus.artifacts.size();
    if (m == 0) return corpus;
    for (std::size_t k = 0; k < corpus.attributes.size(); ++k) {
        if (corpus.attributes[k].kind != AttributeKind::numeric) continue;
        const Vector column = numeric_column(corpus, k);
        const double mean = column.mean();
        const double sd = std::sqrt((column.array() - mean).square().mean());
        const bool constant = sd <= 1e-12 * std::max(1.0, std::abs(mean));
        for (std::size_t i = 0; i < m; ++i)
            corpus.artifacts[i].values[k] = constant ? 0.0 : (column[static_cast<Eigen::Index>(i)] - mean) / sd;
    }
    return corpus;
}

Vector numeric_column(const Corpus& corpus, std::size_t attribute) {
    Vector out(static_cast<Eigen::Index>(corpus.size()));
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto* v = std::get_if<double>(&corpus.artifacts[i].values.at(attribute));
        if (v == nullptr)
            throw SchemaError(fmt::format("attribute '{}' of '{}' is not an observed scalar",
                                          corpus.attributes.at(attribute).name, corpus.artifacts[i].id));
        out[static_cast<Eigen::Index>(i)] = *v;
    }
    return out;
}

Matrix vector_block(const Corpus& corpus, std::size_t attribute) {
    const auto& spec = corpus.attributes.at(attribute);
    Matrix out(static_cast<Eigen::Index>(corpus.size()), static_cast<Eigen::Index>(spec.dimension));
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& value = corpus.artifacts[i].values.at(attribute);
        const auto* vec = std::get_if<std::vector<double>>(&value);
        if (vec == nullptr || vec->size() != spec.dimension)
            throw SchemaError(fmt::format("attribute '{}' of '{}' is not an observed vector", spec.name,
                                          corpus.artifacts[i].id));
        for (std::size_t d = 0; d < spec.dimension; ++d)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = (*vec)[d];
    }
    return out;
}

}  // namespace creativity
