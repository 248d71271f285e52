#include "creativity/unexpectedness.hpp"

#include <algorithm>
#include <cassert>
#include <cstdlib>
#include <limits>

#include <fmt/format.h>

#include "creativity/errors.hpp"

namespace creativity {

std::string_view to_string(UnexpectednessMeasure measure) {
    switch (measure) {
        case UnexpectednessMeasure::max: return "max";
        case UnexpectednessMeasure::mean: return "mean";
        case UnexpectednessMeasure::inverse_weighted: return "inverse_weighted";
    }
    return "unknown";
}

UnexpectednessMeasure parse_measure(std::string_view text) {
    if (text == "max") return UnexpectednessMeasure::max;
    if (text == "mean") return UnexpectednessMeasure::mean;
    if (text == "inverse_weighted") return UnexpectednessMeasure::inverse_weighted;
    throw ArgumentError(fmt::format("unknown unexpectedness measure '{}'", text));
}

EmptyWindowPolicy parse_empty_window_policy(std::string_view text) {
    if (text == "zero") return EmptyWindowPolicy::zero;
    if (text == "flag") return EmptyWindowPolicy::flag;
    throw ArgumentError(fmt::format("unknown empty-window policy '{}'", text));
}

std::string_view to_string(EmptyWindowPolicy policy) {
    return policy == EmptyWindowPolicy::zero ? "zero" : "flag";
}

void UnexpectednessConfig::validate() const {
    if (window_years < 1) throw ArgumentError(fmt::format("window_years {} must be >= 1", window_years));
}

std::vector<Eigen::Index> predecessor_window(Eigen::Index i, std::span<const int> times, int window_years) {
    const int ti = times[static_cast<std::size_t>(i)];
    std::vector<Eigen::Index> out;
    for (std::size_t j = 0; j < times.size(); ++j)
        if (ti - window_years <= times[j] && times[j] < ti) out.push_back(static_cast<Eigen::Index>(j));
    return out;
}

std::optional<double> unexpectedness_score(Eigen::Index i, const Matrix& similarity, std::span<const int> times,
                                           const UnexpectednessConfig& config) {
    const auto window = predecessor_window(i, times, config.window_years);
    if (window.empty()) return std::nullopt;
    switch (config.measure) {
        case UnexpectednessMeasure::max: {
            double best = -std::numeric_limits<double>::infinity();
            for (auto j : window) best = std::max(best, similarity(i, j));
            return -best;
        }
        case UnexpectednessMeasure::mean: {
            double sum = 0.0;
            for (auto j : window) sum += similarity(i, j);
            return -(sum / static_cast<double>(window.size()));
        }
        case UnexpectednessMeasure::inverse_weighted: {
            double weighted = 0.0;
            double weights = 0.0;
            const int ti = times[static_cast<std::size_t>(i)];
            for (auto j : window) {
                const int gap = std::abs(ti - times[static_cast<std::size_t>(j)]);
                assert(gap > 0);
                const double v = 1.0 / static_cast<double>(gap);
                weighted += v * similarity(i, j);
                weights += v;
            }
            return -(weighted / weights);
        }
    }
    return std::nullopt;
}

UnexpectednessVector unexpectedness_vector(const Matrix& similarity, std::span<const int> times,
                                           const UnexpectednessConfig& config) {
    config.validate();
    const Eigen::Index m = similarity.rows();
    if (similarity.cols() != m || static_cast<Eigen::Index>(times.size()) != m)
        throw ArgumentError("similarity matrix and times are misaligned");
    UnexpectednessVector out{Vector(m), std::vector<bool>(static_cast<std::size_t>(m), false)};
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto score = unexpectedness_score(i, similarity, times, config);
        if (score) {
            out.values[i] = *score;
        } else {
            out.empty_window[static_cast<std::size_t>(i)] = true;
            out.values[i] = config.empty_window_policy == EmptyWindowPolicy::zero
                                ? 0.0
                                : std::numeric_limits<double>::quiet_NaN();
        }
    }
    return out;
}

}  // namespace creativity
