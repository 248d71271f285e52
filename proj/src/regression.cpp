#include "creativity/regression.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "creativity/errors.hpp"

namespace creativity {

using nlohmann::json;

LabeledDesign LabeledDesign::subset(std::span<const Eigen::Index> rows) const {
    LabeledDesign out;
    out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
    out.labels.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        out.features.row(static_cast<Eigen::Index>(r)) = features.row(rows[r]);
        out.labels[static_cast<Eigen::Index>(r)] = labels[rows[r]];
    }
    out.feature_names = feature_names;
    return out;
}

void LabeledDesign::validate() const {
    if (features.rows() != labels.size())
        throw IntegrityError(fmt::format("{} feature rows for {} labels", features.rows(), labels.size()));
    if (!feature_names.empty() && static_cast<Eigen::Index>(feature_names.size()) != features.cols())
        throw IntegrityError(fmt::format("{} feature names for {} columns", feature_names.size(), features.cols()));
    if (!features.allFinite() || !labels.allFinite()) throw ArgumentError("design contains non-finite entries");
}

Vector normalize_labels(std::span<const double> raw, double maximum) {
    if (!(maximum > 0.0)) throw ArgumentError("label maximum must be positive");
    Vector out(static_cast<Eigen::Index>(raw.size()));
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const double y = raw[i] / maximum;
        if (!(y >= 0.0 && y <= 1.0))
            throw ArgumentError(fmt::format("label value {} outside [0, {}]", raw[i], maximum));
        out[static_cast<Eigen::Index>(i)] = y;
    }
    return out;
}

LabeledDesign make_design(Matrix features, std::span<const double> raw_labels, double label_maximum,
                          std::vector<std::string> feature_names) {
    LabeledDesign design{std::move(features), normalize_labels(raw_labels, label_maximum), std::move(feature_names)};
    design.validate();
    return design;
}

SplitIndices split_indices(Eigen::Index m, const SplitSpec& spec) {
    if (m < 2) throw ArgumentError("a train/test split needs at least 2 rows");
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
        throw ArgumentError(fmt::format("train fraction {} outside (0, 1)", spec.train_fraction));
    std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::mt19937_64 rng(spec.seed);
    for (std::size_t i = order.size() - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(rng() % (i + 1));
        std::swap(order[i], order[j]);
    }
    auto n_train = static_cast<Eigen::Index>(std::floor(static_cast<double>(m) * spec.train_fraction));
    n_train = std::clamp<Eigen::Index>(n_train, 1, m - 1);
    SplitIndices out;
    out.train.assign(order.begin(), order.begin() + n_train);
    out.test.assign(order.begin() + n_train, order.end());
    return out;
}

std::pair<LabeledDesign, LabeledDesign> split(const LabeledDesign& design, const SplitSpec& spec) {
    design.validate();
    const auto idx = split_indices(design.rows(), spec);
    return {design.subset(idx.train), design.subset(idx.test)};
}

Standardizer Standardizer::fit(const Matrix& x, bool scale_features) {
    Standardizer s;
    const auto n = static_cast<double>(x.rows());
    s.mean = x.rows() > 0 ? Vector(x.colwise().mean().transpose()) : Vector::Zero(x.cols());
    s.scale = Vector::Ones(x.cols());
    if (scale_features && x.rows() > 0) {
        for (Eigen::Index c = 0; c < x.cols(); ++c) {
            const double sd = std::sqrt((x.col(c).array() - s.mean[c]).square().sum() / n);
            if (sd > 1e-12 * std::max(1.0, std::abs(s.mean[c]))) s.scale[c] = sd;
        }
    }
    return s;
}

Matrix Standardizer::apply(const Matrix& x) const {
    return (x.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
}

std::string_view to_string(ModelKind kind) { return kind == ModelKind::ridge ? "ridge" : "knn"; }

ModelKind parse_model_kind(std::string_view text) {
    if (text == "ridge") return ModelKind::ridge;
    if (text == "knn") return ModelKind::knn;
    throw ArgumentError(fmt::format("unknown model '{}'", text));
}

void FittedModel::check_width(const Matrix& features) const {
    if (features.cols() != standardizer_.mean.size())
        throw ArgumentError(
            fmt::format("model expects {} features, got {}", standardizer_.mean.size(), features.cols()));
}

json FittedModel::describe_common() const {
    json j;
    j["kind"] = std::string(to_string(kind()));
    j["feature_names"] = feature_names_;
    j["standardizer"] = {
        {"mean", std::vector<double>(standardizer_.mean.data(), standardizer_.mean.data() + standardizer_.mean.size())},
        {"scale",
         std::vector<double>(standardizer_.scale.data(), standardizer_.scale.data() + standardizer_.scale.size())}};
    return j;
}

// ---------------------------------------------------------------------------
// Ridge

RidgeModel::RidgeModel(Standardizer standardizer, std::vector<std::string> names, Vector weights,
                       double intercept, double lambda, bool rank_deficient)
    : FittedModel(std::move(standardizer), std::move(names)),
      weights_(std::move(weights)),
      intercept_(intercept),
      lambda_(lambda),
      rank_deficient_(rank_deficient) {}

Vector RidgeModel::predict(const Matrix& features) const {
    check_width(features);
    Vector out = standardizer().apply(features) * weights_;
    out.array() += intercept_;
    return out;
}

json RidgeModel::describe() const {
    json j = describe_common();
    j["hyperparameters"] = {{"lambda", lambda_}};
    j["weights"] = std::vector<double>(weights_.data(), weights_.data() + weights_.size());
    j["intercept"] = intercept_;
    j["rank_deficient"] = rank_deficient_;
    return j;
}

RidgeModel fit_ridge(const LabeledDesign& train, const RidgeOptions& options) {
    train.validate();
    if (train.cols() < 1) throw ArgumentError("ridge needs at least one feature");
    if (train.rows() < 1) throw ArgumentError("ridge needs at least one training row");
    if (!(options.lambda >= 0.0) || !std::isfinite(options.lambda))
        throw ArgumentError(fmt::format("lambda {} must be a nonnegative finite number", options.lambda));

    auto standardizer = Standardizer::fit(train.features, options.scale_features);
    const Matrix x = standardizer.apply(train.features);
    const double intercept = train.labels.mean();
    const Vector y = train.labels.array() - intercept;

    Matrix gram = x.transpose() * x;
    gram.diagonal().array() += options.lambda;
    Vector weights;
    bool rank_deficient = false;
    Eigen::LDLT<Matrix> ldlt(gram);
    const Vector pivots = ldlt.vectorD().cwiseAbs();
    const double largest = pivots.size() > 0 ? pivots.maxCoeff() : 0.0;
    const bool singular = ldlt.info() != Eigen::Success || !(largest > 0.0) ||
                          pivots.minCoeff() <= 1e-12 * largest;
    if (!singular) {
        weights = ldlt.solve(x.transpose() * y);
    } else {
        // Only reachable at lambda = 0 (or a vanishing lambda): minimum-norm least squares.
        rank_deficient = true;
        Eigen::CompleteOrthogonalDecomposition<Matrix> cod(x);
        cod.setThreshold(1e-10);
        weights = cod.solve(y);
    }
    return RidgeModel(std::move(standardizer), train.feature_names, std::move(weights), intercept, options.lambda,
                      rank_deficient);
}

// ---------------------------------------------------------------------------
// KNN

KnnModel::KnnModel(Standardizer standardizer, std::vector<std::string> names, Matrix train_rows,
                   Vector train_labels, int k)
    : FittedModel(std::move(standardizer), std::move(names)),
      train_rows_(std::move(train_rows)),
      train_labels_(std::move(train_labels)),
      k_(k) {}

Vector KnnModel::predict(const Matrix& features) const {
    check_width(features);
    const Matrix queries = standardizer().apply(features);
    const Eigen::Index n = train_rows_.rows();
    Vector out(queries.rows());
    std::vector<std::pair<double, Eigen::Index>> ranked(static_cast<std::size_t>(n));
    for (Eigen::Index q = 0; q < queries.rows(); ++q) {
        for (Eigen::Index r = 0; r < n; ++r)
            ranked[static_cast<std::size_t>(r)] = {(train_rows_.row(r) - queries.row(q)).squaredNorm(), r};
        std::partial_sort(ranked.begin(), ranked.begin() + k_, ranked.end());
        double sum = 0.0;
        for (int i = 0; i < k_; ++i) sum += train_labels_[ranked[static_cast<std::size_t>(i)].second];
        out[q] = sum / static_cast<double>(k_);
    }
    return out;
}

json KnnModel::describe() const {
    json j = describe_common();
    j["hyperparameters"] = {{"k", k_}};
    j["training_rows"] = train_rows_.rows();
    return j;
}

KnnModel fit_knn(const LabeledDesign& train, int k) {
    train.validate();
    if (k < 1) throw ArgumentError("k must be positive");
    if (k > train.rows()) throw ArgumentError(fmt::format("k = {} exceeds {} training rows", k, train.rows()));
    auto standardizer = Standardizer::fit(train.features);
    Matrix rows = standardizer.apply(train.features);
    return KnnModel(std::move(standardizer), train.feature_names, std::move(rows), train.labels, k);
}

double rmse(const Vector& predictions, const Vector& labels) {
    if (predictions.size() == 0) throw ArgumentError("rmse of an empty vector");
    if (predictions.size() != labels.size())
        throw ArgumentError(fmt::format("rmse of vectors with lengths {} and {}", predictions.size(), labels.size()));
    return std::sqrt((predictions - labels).squaredNorm() / static_cast<double>(predictions.size()));
}

std::unique_ptr<FittedModel> fit_model(const ModelSpec& spec, const LabeledDesign& train) {
    if (spec.kind == ModelKind::ridge) return std::make_unique<RidgeModel>(fit_ridge(train, spec.lambda));
    return std::make_unique<KnnModel>(fit_knn(train, spec.k));
}

}  // namespace creativity
