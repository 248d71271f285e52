#include "creativity/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "creativity/errors.hpp"

namespace creativity {

ThresholdRule ThresholdRule::parse(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos)
        throw ArgumentError(fmt::format("threshold rule '{}' must look like fixed:T or percentile:P", text));
    const auto head = text.substr(0, colon);
    const auto tail = text.substr(colon + 1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), value);
    if (ec != std::errc{} || ptr != tail.data() + tail.size())
        throw ArgumentError(fmt::format("threshold rule '{}': bad number", text));
    if (head == "fixed") return fixed(value);
    if (head == "percentile") return percentile(value);
    throw ArgumentError(fmt::format("unknown threshold rule '{}'", head));
}

std::string ThresholdRule::to_string() const {
    return fmt::format("{}:{}", kind == Kind::fixed ? "fixed" : "percentile", value);
}

void GraphConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError(fmt::format("alpha {} outside (0, 1)", alpha));
    if (!(beta >= 0.0 && beta <= 1.0)) throw ArgumentError(fmt::format("beta {} outside [0, 1]", beta));
    if (threshold.kind == ThresholdRule::Kind::percentile && !(threshold.value > 0.0 && threshold.value < 100.0))
        throw ArgumentError(fmt::format("percentile {} outside (0, 100)", threshold.value));
    if (threshold.kind == ThresholdRule::Kind::fixed && !std::isfinite(threshold.value))
        throw ArgumentError("fixed threshold must be finite");
    if (!(convergence_tol > 0.0)) throw ArgumentError("convergence tolerance must be positive");
    if (max_iterations < 1) throw ArgumentError("max_iterations must be positive");
}

bool DirectedGraphPair::fully_dangling() const {
    const auto m = static_cast<std::size_t>(size());
    return prior_dangling.size() == m && subsequent_dangling.size() == m;
}

double compute_threshold(const Matrix& forward, const ThresholdRule& rule) {
    if (rule.kind == ThresholdRule::Kind::fixed) return rule.value;
    std::vector<double> positive;
    for (Eigen::Index j = 0; j < forward.cols(); ++j)
        for (Eigen::Index i = 0; i < forward.rows(); ++i)
            if (forward(i, j) > 0.0) positive.push_back(forward(i, j));
    if (positive.empty()) throw ThresholdError("percentile threshold needs at least one positive forward edge");
    std::sort(positive.begin(), positive.end());
    const double rank = rule.value / 100.0 * static_cast<double>(positive.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(rank));
    const auto hi = std::min(lo + 1, positive.size() - 1);
    const double frac = rank - static_cast<double>(lo);
    return positive[lo] + frac * (positive[hi] - positive[lo]);
}

Matrix forward_weights(const Matrix& similarity, std::span<const int> times) {
    const Eigen::Index m = similarity.rows();
    Matrix out = Matrix::Zero(m, m);
    for (Eigen::Index j = 0; j < m; ++j)
        for (Eigen::Index i = 0; i < m; ++i)
            if (times[static_cast<std::size_t>(i)] < times[static_cast<std::size_t>(j)]) out(i, j) = similarity(i, j);
    return out;
}

namespace {

std::vector<Eigen::Index> normalize_columns(Matrix& w) {
    std::vector<Eigen::Index> dangling;
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
        const double sum = w.col(j).sum();
        if (sum > 0.0) {
            w.col(j) /= sum;
        } else {
            w.col(j).setZero();
            dangling.push_back(j);
        }
    }
    return dangling;
}

}  // namespace

DirectedGraphPair build_graph_pair(const SimilarityMatrix& sim, std::span<const int> times,
                                   const GraphConfig& config) {
    config.validate();
    const Eigen::Index m = sim.size();
    if (m == 0) throw ArgumentError("cannot build a creativity graph for an empty corpus");
    if (sim.values.cols() != m) throw ArgumentError("similarity matrix must be square");
    if (static_cast<Eigen::Index>(times.size()) != m)
        throw ArgumentError(fmt::format("{} times for {} artifacts", times.size(), m));
    if ((sim.values.array() < 0.0).any() || !sim.values.allFinite())
        throw ArgumentError(fmt::format("similarity '{}' has negative or non-finite entries", sim.attribute));

    const Matrix forward = forward_weights(sim.values, times);
    DirectedGraphPair out;
    const bool has_positive = (forward.array() > 0.0).any();
    if (config.threshold.kind == ThresholdRule::Kind::fixed || has_positive)
        out.threshold = compute_threshold(forward, config.threshold);

    // Threshold forward pairs, then reverse the ones left with a negative residual.
    Matrix reversed = Matrix::Zero(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index i = 0; i < m; ++i) {
            if (!(times[static_cast<std::size_t>(i)] < times[static_cast<std::size_t>(j)])) continue;
            const double residual = forward(i, j) - out.threshold;
            if (residual >= 0.0) {
                reversed(i, j) += residual;
            } else {
                reversed(j, i) += -residual;
            }
        }
    }

    out.prior = Matrix::Zero(m, m);
    out.subsequent = Matrix::Zero(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index i = 0; i < m; ++i) {
            if (i == j) continue;
            if (times[static_cast<std::size_t>(i)] > times[static_cast<std::size_t>(j)]) {
                out.prior(i, j) = reversed(i, j);
            } else {
                out.subsequent(i, j) = reversed(i, j);
            }
        }
    }
    out.prior_dangling = normalize_columns(out.prior);
    out.subsequent_dangling = normalize_columns(out.subsequent);
    return out;
}

Matrix effective_iteration_matrix(const DirectedGraphPair& graphs, const GraphConfig& config) {
    const Eigen::Index m = graphs.size();
    const double md = static_cast<double>(m);
    Matrix prior = graphs.prior;
    Matrix subsequent = graphs.subsequent;
    for (auto j : graphs.prior_dangling) prior.col(j).setConstant(1.0 / md);
    for (auto j : graphs.subsequent_dangling) subsequent.col(j).setConstant(1.0 / md);
    return Matrix::Constant(m, m, (1.0 - config.alpha) / md) + config.alpha * config.beta * prior +
           config.alpha * (1.0 - config.beta) * subsequent;
}

CreativityScores solve_scores(const DirectedGraphPair& graphs, const GraphConfig& config) {
    config.validate();
    const Eigen::Index m = graphs.size();
    if (m == 0) throw ArgumentError("cannot score an empty graph");
    const double md = static_cast<double>(m);
    const double prior_weight = config.alpha * config.beta;
    const double subsequent_weight = config.alpha * (1.0 - config.beta);

    auto dangling_mass = [](const std::vector<Eigen::Index>& columns, const Vector& c) {
        double mass = 0.0;
        for (auto j : columns) mass += c[j];
        return mass;
    };

    CreativityScores out;
    Vector current = Vector::Constant(m, 1.0 / md);
    for (int it = 1; it <= config.max_iterations; ++it) {
        const Vector novelty = prior_weight * (graphs.prior * current);
        const Vector influence = subsequent_weight * (graphs.subsequent * current);
        const double share = (prior_weight * dangling_mass(graphs.prior_dangling, current) +
                              subsequent_weight * dangling_mass(graphs.subsequent_dangling, current)) /
                             md;
        Vector next = novelty + influence;
        next.array() += (1.0 - config.alpha) / md + share;

        const double change = (next - current).lpNorm<1>();
        out.iterations_used = it;
        if (change < config.convergence_tol || it == config.max_iterations) {
            out.converged = change < config.convergence_tol;
            out.novelty = novelty;
            out.influence = influence;
            out.dangling_share = share;
            out.aggregate = std::move(next);
            return out;
        }
        current = next / next.sum();
    }
    return out;
}

}  // namespace creativity
