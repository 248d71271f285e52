#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

#include "creativity/dataset.hpp"

namespace creativity {

double linear_similarity(double a, double b);
double exponential_similarity(double a, double b);

// Cosine of the angle between u and v; 0 when either vector has zero norm.
double cosine_similarity(std::span<const double> u, std::span<const double> v);

struct SimilarityMatrix {
    std::string attribute;
    Kernel kernel = Kernel::linear;
    Matrix values;

    Eigen::Index size() const { return values.rows(); }
};

SimilarityMatrix build_similarity_matrix(const Corpus& corpus, std::string_view attribute, Kernel kernel);

// Graph edges must be nonnegative; negative cosine entries are floored at 0.
SimilarityMatrix clamp_negative(SimilarityMatrix sim);

// Cache format: "CSIM", u32 m, u32 reserved, then m*m little-endian f64, row-major.
void write_similarity_matrix(std::ostream& out, const Matrix& values);
Matrix read_similarity_matrix(std::istream& in);
void save_similarity_matrix(const std::filesystem::path& path, const Matrix& values);
Matrix load_similarity_matrix(const std::filesystem::path& path);

}  // namespace creativity
