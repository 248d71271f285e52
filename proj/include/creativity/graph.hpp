#pragma once

#include <span>
#include <string>
#include <vector>

#include "creativity/dataset.hpp"
#include "creativity/similarity.hpp"

namespace creativity {

struct ThresholdRule {
    enum class Kind { fixed, percentile };

    Kind kind = Kind::percentile;
    double value = 50.0;

    static ThresholdRule fixed(double tau) { return {Kind::fixed, tau}; }
    static ThresholdRule percentile(double p) { return {Kind::percentile, p}; }

    // "fixed:0.4" or "percentile:50"
    static ThresholdRule parse(std::string_view text);
    std::string to_string() const;
};

struct GraphConfig {
    double alpha = 0.95;
    double beta = 0.2;
    ThresholdRule threshold = ThresholdRule::percentile(50.0);
    double convergence_tol = 1e-10;
    int max_iterations = 200;

    void validate() const;
};

// Column j holds the weight node j passes to each row i during propagation.
// prior: rows later than columns (reversed, below-threshold edges).
// subsequent: rows not later than columns (forward edges that kept their direction).
struct DirectedGraphPair {
    Matrix prior;
    Matrix subsequent;
    std::vector<Eigen::Index> prior_dangling;
    std::vector<Eigen::Index> subsequent_dangling;
    double threshold = 0.0;

    Eigen::Index size() const { return prior.rows(); }
    bool fully_dangling() const;
};

struct CreativityScores {
    Vector aggregate;
    Vector novelty;
    Vector influence;
    // Per-node share of the mass redistributed from dangling columns;
    // aggregate = (1 - alpha)/m + novelty + influence + dangling_share.
    double dangling_share = 0.0;
    int iterations_used = 0;
    bool converged = false;
};

// p-th percentile (linear interpolation) of the strictly positive entries, or the fixed value.
double compute_threshold(const Matrix& forward_weights, const ThresholdRule& rule);

// Similarities restricted to pairs going forward in time (row strictly earlier than column).
Matrix forward_weights(const Matrix& similarity, std::span<const int> times);

DirectedGraphPair build_graph_pair(const SimilarityMatrix& sim, std::span<const int> times,
                                   const GraphConfig& config);

// Dense column-stochastic matrix the power iteration applies, dangling columns repaired.
Matrix effective_iteration_matrix(const DirectedGraphPair& graphs, const GraphConfig& config);

CreativityScores solve_scores(const DirectedGraphPair& graphs, const GraphConfig& config);

}  // namespace creativity
