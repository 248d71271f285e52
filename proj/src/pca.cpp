#include <cmath>
#include <random>

#include <fmt/format.h>

#include "creativity/dataset.hpp"
#include "creativity/errors.hpp"

namespace creativity {

namespace {

// Projects x onto the orthogonal complement of the first `count` columns of basis.
void orthogonalize(Vector& x, const Matrix& basis, Eigen::Index count) {
    for (Eigen::Index r = 0; r < count; ++r) x -= basis.col(r).dot(x) * basis.col(r);
}

// Dominant eigenpairs of a symmetric PSD operator by power iteration with
// deflation. Extraction stops once the retained eigenvalues reach
// `target` or the operator has no variance left.
struct EigenPairs {
    Matrix vectors;
    std::vector<double> values;
};

EigenPairs deflated_power_iteration(const Matrix& op, double target, double total, const PcaOptions& options) {
    const Eigen::Index n = op.rows();
    EigenPairs out;
    out.vectors = Matrix::Zero(n, n);
    std::mt19937_64 rng(0x5eedULL);
    std::normal_distribution<double> normal(0.0, 1.0);
    double retained = 0.0;
    const double negligible = 1e-12 * total;

    for (Eigen::Index r = 0; r < n; ++r) {
        if (retained >= target) break;
        Vector x(n);
        for (Eigen::Index i = 0; i < n; ++i) x[i] = normal(rng);
        orthogonalize(x, out.vectors, r);
        orthogonalize(x, out.vectors, r);
        double norm = x.norm();
        if (norm == 0.0) break;
        x /= norm;

        bool exhausted = false;
        for (int it = 0; it < options.max_iterations; ++it) {
            Vector y = op * x;
            orthogonalize(y, out.vectors, r);
            norm = y.norm();
            if (norm <= negligible) {
                exhausted = true;
                break;
            }
            y /= norm;
            const double change = (y - x).norm();
            x = std::move(y);
            if (change < options.tolerance) break;
        }
        if (exhausted) break;
        // Re-orthogonalize so the basis stays orthonormal even when the
        // iteration stopped on max_iterations.
        orthogonalize(x, out.vectors, r);
        x.normalize();
        const double value = x.dot(op * x);
        if (value <= negligible) break;
        out.vectors.col(r) = x;
        out.values.push_back(value);
        retained += value;
    }
    out.vectors.conservativeResize(n, static_cast<Eigen::Index>(out.values.size()));
    return out;
}

}  // namespace

double PrincipalComponents::explained_fraction() const {
    if (total_variance <= 0.0) return 1.0;
    return eigenvalues.sum() / total_variance;
}

Matrix PrincipalComponents::project(const Matrix& block) const {
    return (block.rowwise() - mean.transpose()) * components;
}

PrincipalComponents principal_components(const Matrix& block, double variance_fraction,
                                         const PcaOptions& options) {
    if (!(variance_fraction > 0.0 && variance_fraction <= 1.0))
        throw ArgumentError(fmt::format("variance fraction {} outside (0, 1]", variance_fraction));
    const Eigen::Index m = block.rows();
    const Eigen::Index dim = block.cols();

    PrincipalComponents pc;
    pc.mean = m > 0 ? Vector(block.colwise().mean().transpose()) : Vector::Zero(dim);
    pc.components = Matrix::Zero(dim, 0);
    pc.eigenvalues = Vector::Zero(0);
    if (m < 2) return pc;

    const Matrix centered = block.rowwise() - pc.mean.transpose();
    const double scale = 1.0 / static_cast<double>(m - 1);
    pc.total_variance = centered.squaredNorm() * scale;
    if (pc.total_variance <= 0.0) return pc;
    const double target = (variance_fraction - 1e-10) * pc.total_variance;

    if (dim <= m) {
        const Matrix covariance = centered.transpose() * centered * scale;
        auto pairs = deflated_power_iteration(covariance, target, pc.total_variance, options);
        pc.components = std::move(pairs.vectors);
        pc.eigenvalues = Eigen::Map<const Vector>(pairs.values.data(), static_cast<Eigen::Index>(pairs.values.size()));
        return pc;
    }

    // Wide block: the Gram matrix shares the nonzero spectrum and is smaller.
    const Matrix gram = centered * centered.transpose() * scale;
    auto pairs = deflated_power_iteration(gram, target, pc.total_variance, options);
    const auto k = static_cast<Eigen::Index>(pairs.values.size());
    pc.components = Matrix::Zero(dim, k);
    for (Eigen::Index r = 0; r < k; ++r) {
        Vector v = centered.transpose() * pairs.vectors.col(r);
        orthogonalize(v, pc.components, r);
        v.normalize();
        pc.components.col(r) = v;
    }
    pc.eigenvalues = Eigen::Map<const Vector>(pairs.values.data(), k);
    return pc;
}

ValueFeatures pca_value_features(const Corpus& corpus, double variance_fraction, const PcaOptions& options) {
    if (!(variance_fraction > 0.0 && variance_fraction <= 1.0))
        throw ArgumentError(fmt::format("variance fraction {} outside (0, 1]", variance_fraction));
    const auto m = static_cast<Eigen::Index>(corpus.size());
    std::vector<Matrix> blocks;
    ValueFeatures out;
    std::size_t width = 0;
    for (std::size_t k = 0; k < corpus.attributes.size(); ++k) {
        const auto& spec = corpus.attributes[k];
        if (spec.kind == AttributeKind::numeric) {
            blocks.emplace_back(numeric_column(corpus, k));
            out.explained_variance.push_back(1.0);
            out.column_names.push_back(spec.name);
        } else {
            auto pc = principal_components(vector_block(corpus, k), variance_fraction, options);
            blocks.push_back(pc.project(vector_block(corpus, k)));
            out.explained_variance.push_back(pc.explained_fraction());
            for (Eigen::Index c = 0; c < pc.components.cols(); ++c)
                out.column_names.push_back(fmt::format("{}_pc{}", spec.name, c + 1));
        }
        out.per_attribute_spans.push_back({width, static_cast<std::size_t>(blocks.back().cols())});
        width += static_cast<std::size_t>(blocks.back().cols());
    }
    out.matrix = Matrix(m, static_cast<Eigen::Index>(width));
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        const auto& span = out.per_attribute_spans[k];
        if (span.width > 0)
            out.matrix.middleCols(static_cast<Eigen::Index>(span.begin), static_cast<Eigen::Index>(span.width)) =
                blocks[k];
    }
    return out;
}

}  // namespace creativity
