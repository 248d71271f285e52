#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace creativity {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class AttributeKind { numeric, vector };
enum class Kernel { linear, exponential, cosine };

std::string_view to_string(AttributeKind kind);
std::string_view to_string(Kernel kernel);
AttributeKind parse_attribute_kind(std::string_view text);
Kernel parse_kernel(std::string_view text);

struct AttributeSpec {
    std::string name;
    AttributeKind kind = AttributeKind::numeric;
    std::size_t dimension = 1;
    Kernel similarity_kind = Kernel::linear;

    // Throws SchemaError when kind, dimension and kernel disagree.
    void validate() const;

    // Graphs built for this attribute: numeric attributes get both the linear
    // and the exponential kernel, vector attributes get cosine.
    std::vector<Kernel> kernels() const;
};

struct LabelSpec {
    std::string name;
    double maximum = 1.0;
};

struct Schema {
    std::vector<AttributeSpec> attributes;
    std::vector<LabelSpec> labels;
};

struct Missing {
    bool operator==(const Missing&) const = default;
};

using AttributeValue = std::variant<Missing, double, std::vector<double>>;

inline bool is_missing(const AttributeValue& v) { return std::holds_alternative<Missing>(v); }

struct ArtifactRecord {
    std::string id;
    int year = 0;
    std::vector<AttributeValue> values;
};

struct Label {
    std::string name;
    double maximum = 1.0;
    std::vector<double> values;
};

struct Corpus {
    std::vector<AttributeSpec> attributes;
    std::vector<ArtifactRecord> artifacts;
    std::vector<Label> labels;

    std::size_t size() const { return artifacts.size(); }
    std::size_t attribute_index(std::string_view name) const;
    const Label& label(std::string_view name) const;
    std::vector<int> years() const;
    std::vector<std::string> ids() const;
    bool has_missing() const;

    // Checks record shapes and id uniqueness; throws SchemaError / IntegrityError.
    void validate() const;
};

struct LoadReport {
    std::size_t rows_read = 0;
    std::size_t dropped_missing_year = 0;
    std::size_t dropped_missing_label = 0;
};

struct LoadResult {
    Corpus corpus;
    LoadReport report;
};

Schema parse_schema(std::istream& in, const std::string& source = "<schema>");
Schema load_schema(const std::filesystem::path& path);

// Artifact table is CSV (id, year, one column per numeric attribute and per
// label, matched by header name). Vector store is JSON Lines.
LoadResult load_corpus(std::istream& artifact_table, std::istream& vector_store, const Schema& schema,
                       const std::string& table_name = "<artifacts>",
                       const std::string& vectors_name = "<vectors>");
LoadResult load_corpus(const std::filesystem::path& artifact_table,
                       const std::filesystem::path& vector_store, const Schema& schema);

// Numeric MISSING -> attribute mean, vector MISSING -> zero vector.
Corpus impute(Corpus corpus);

// Numeric attributes to zero mean / unit population sd; constant attributes become zeros.
Corpus normalize_numeric(Corpus corpus);

Vector numeric_column(const Corpus& corpus, std::size_t attribute);
Matrix vector_block(const Corpus& corpus, std::size_t attribute);

// Principal components of one attribute block.
struct PcaOptions {
    double tolerance = 1e-10;
    int max_iterations = 1000;
};

struct PrincipalComponents {
    Vector mean;
    Matrix components;  // dim x k, orthonormal columns
    Vector eigenvalues;  // k, non-increasing
    double total_variance = 0.0;

    double explained_fraction() const;
    Matrix project(const Matrix& block) const;
};

PrincipalComponents principal_components(const Matrix& block, double variance_fraction,
                                         const PcaOptions& options = {});

struct ColumnSpan {
    std::size_t begin = 0;
    std::size_t width = 0;
};

struct ValueFeatures {
    Matrix matrix;
    std::vector<ColumnSpan> per_attribute_spans;
    std::vector<double> explained_variance;
    std::vector<std::string> column_names;
};

ValueFeatures pca_value_features(const Corpus& corpus, double variance_fraction,
                                 const PcaOptions& options = {});

}  // namespace creativity
