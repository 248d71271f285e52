#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "creativity/dataset.hpp"

namespace creativity {

struct LabeledDesign {
    Matrix features;
    Vector labels;  // normalized to [0, 1]
    std::vector<std::string> feature_names;

    Eigen::Index rows() const { return features.rows(); }
    Eigen::Index cols() const { return features.cols(); }
    LabeledDesign subset(std::span<const Eigen::Index> rows) const;
    void validate() const;
};

// Divides raw labels by their declared maximum; every result must land in [0, 1].
Vector normalize_labels(std::span<const double> raw, double maximum);
LabeledDesign make_design(Matrix features, std::span<const double> raw_labels, double label_maximum,
                          std::vector<std::string> feature_names);

struct SplitSpec {
    double train_fraction = 0.8;
    std::uint64_t seed = 0;
};

struct SplitIndices {
    std::vector<Eigen::Index> train;
    std::vector<Eigen::Index> test;
};

// Seeded Fisher-Yates shuffle; the first floor(m * fraction) rows train.
SplitIndices split_indices(Eigen::Index m, const SplitSpec& spec);
std::pair<LabeledDesign, LabeledDesign> split(const LabeledDesign& design, const SplitSpec& spec);

struct Standardizer {
    Vector mean;
    Vector scale;

    // Constant columns keep scale 1 and become zero after centering.
    static Standardizer fit(const Matrix& x, bool scale_features = true);
    Matrix apply(const Matrix& x) const;
};

enum class ModelKind { ridge, knn };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view text);

// Fitted models are immutable and safe to share between threads.
class FittedModel {
public:
    virtual ~FittedModel() = default;

    virtual ModelKind kind() const = 0;
    virtual Vector predict(const Matrix& features) const = 0;
    virtual nlohmann::json describe() const = 0;

    const Standardizer& standardizer() const { return standardizer_; }
    const std::vector<std::string>& feature_names() const { return feature_names_; }

protected:
    FittedModel(Standardizer standardizer, std::vector<std::string> feature_names)
        : standardizer_(std::move(standardizer)), feature_names_(std::move(feature_names)) {}

    void check_width(const Matrix& features) const;
    nlohmann::json describe_common() const;

private:
    Standardizer standardizer_;
    std::vector<std::string> feature_names_;
};

struct RidgeOptions {
    double lambda = 1.0;
    bool scale_features = true;
};

class RidgeModel final : public FittedModel {
public:
    RidgeModel(Standardizer standardizer, std::vector<std::string> names, Vector weights, double intercept,
               double lambda, bool rank_deficient);

    ModelKind kind() const override { return ModelKind::ridge; }
    Vector predict(const Matrix& features) const override;
    nlohmann::json describe() const override;

    const Vector& weights() const { return weights_; }
    double intercept() const { return intercept_; }
    double lambda() const { return lambda_; }
    // True when lambda = 0 met a singular system and the minimum-norm solution was used.
    bool rank_deficient() const { return rank_deficient_; }

private:
    Vector weights_;
    double intercept_;
    double lambda_;
    bool rank_deficient_;
};

class KnnModel final : public FittedModel {
public:
    KnnModel(Standardizer standardizer, std::vector<std::string> names, Matrix train_rows, Vector train_labels,
             int k);

    ModelKind kind() const override { return ModelKind::knn; }
    Vector predict(const Matrix& features) const override;
    nlohmann::json describe() const override;

    int k() const { return k_; }

private:
    Matrix train_rows_;  // standardized
    Vector train_labels_;
    int k_;
};

RidgeModel fit_ridge(const LabeledDesign& train, const RidgeOptions& options);
inline RidgeModel fit_ridge(const LabeledDesign& train, double lambda) {
    return fit_ridge(train, RidgeOptions{lambda, true});
}

KnnModel fit_knn(const LabeledDesign& train, int k);

inline Vector predict(const FittedModel& model, const Matrix& features) { return model.predict(features); }

double rmse(const Vector& predictions, const Vector& labels);

struct ModelSpec {
    ModelKind kind = ModelKind::ridge;
    double lambda = 1.0;
    int k = 5;
};

std::unique_ptr<FittedModel> fit_model(const ModelSpec& spec, const LabeledDesign& train);

}  // namespace creativity
