#include "creativity/similarity.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "creativity/errors.hpp"

namespace creativity {

namespace {

void require_finite(double a, double b) {
    if (!std::isfinite(a) || !std::isfinite(b))
        throw ArgumentError(fmt::format("similarity of non-finite values ({}, {})", a, b));
}

}  // namespace

double linear_similarity(double a, double b) {
    require_finite(a, b);
    return 1.0 / (1.0 + std::abs(a - b));
}

double exponential_similarity(double a, double b) {
    require_finite(a, b);
    return std::exp(-std::abs(a - b));
}

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size())
        throw ArgumentError(fmt::format("cosine of vectors with lengths {} and {}", u.size(), v.size()));
    double dot = 0.0;
    double uu = 0.0;
    double vv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        uu += u[i] * u[i];
        vv += v[i] * v[i];
    }
    if (uu == 0.0 || vv == 0.0) return 0.0;
    return std::clamp(dot / (std::sqrt(uu) * std::sqrt(vv)), -1.0, 1.0);
}

SimilarityMatrix build_similarity_matrix(const Corpus& corpus, std::string_view attribute, Kernel kernel) {
    const std::size_t k = corpus.attribute_index(attribute);
    const auto& spec = corpus.attributes[k];
    const bool scalar_kernel = kernel != Kernel::cosine;
    if (scalar_kernel != (spec.kind == AttributeKind::numeric))
        throw SchemaError(fmt::format("kernel {} cannot be applied to {} attribute '{}'", to_string(kernel),
                                      to_string(spec.kind), spec.name));

    const auto m = static_cast<Eigen::Index>(corpus.size());
    SimilarityMatrix out{spec.name, kernel, Matrix(m, m)};
    if (scalar_kernel) {
        const Vector x = numeric_column(corpus, k);
        auto fn = kernel == Kernel::linear ? linear_similarity : exponential_similarity;
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = i; j < m; ++j) out.values(i, j) = out.values(j, i) = fn(x[i], x[j]);
    } else {
        // Row-major copy so each row is a contiguous span.
        using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
        const RowMatrix block = vector_block(corpus, k);
        const auto dim = static_cast<std::size_t>(block.cols());
        for (Eigen::Index i = 0; i < m; ++i) {
            std::span<const double> u(block.row(i).data(), dim);
            for (Eigen::Index j = i; j < m; ++j) {
                std::span<const double> v(block.row(j).data(), dim);
                out.values(i, j) = out.values(j, i) = cosine_similarity(u, v);
            }
        }
    }
    return out;
}

SimilarityMatrix clamp_negative(SimilarityMatrix sim) {
    sim.values = sim.values.cwiseMax(0.0);
    return sim;
}

// ---------------------------------------------------------------------------
// Binary cache

namespace {

constexpr std::array<char, 4> kMagic{'C', 'S', 'I', 'M'};

template <typename T>
void put_le(std::ostream& out, T value) {
    std::array<unsigned char, sizeof(T)> bytes{};
    std::memcpy(bytes.data(), &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
    std::array<unsigned char, sizeof(T)> bytes{};
    if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T)))
        throw ParseError("<similarity cache>", 0, "truncated file");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
}

}  // namespace

void write_similarity_matrix(std::ostream& out, const Matrix& values) {
    if (values.rows() != values.cols()) throw ArgumentError("similarity matrix must be square");
    out.write(kMagic.data(), kMagic.size());
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(values.rows()));
    put_le<std::uint32_t>(out, 0);
    for (Eigen::Index i = 0; i < values.rows(); ++i)
        for (Eigen::Index j = 0; j < values.cols(); ++j) put_le<double>(out, values(i, j));
}

Matrix read_similarity_matrix(std::istream& in) {
    std::array<char, 4> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kMagic)
        throw ParseError("<similarity cache>", 0, "bad magic, expected CSIM");
    const auto m = static_cast<Eigen::Index>(get_le<std::uint32_t>(in));
    (void)get_le<std::uint32_t>(in);
    Matrix values(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j) values(i, j) = get_le<double>(in);
    return values;
}

void save_similarity_matrix(const std::filesystem::path& path, const Matrix& values) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(fmt::format("cannot write {}", path.string()));
    write_similarity_matrix(out, values);
}

Matrix load_similarity_matrix(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path.string(), 0, "cannot open similarity cache");
    return read_similarity_matrix(in);
}

}  // namespace creativity
