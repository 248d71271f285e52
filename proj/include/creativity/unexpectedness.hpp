#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "creativity/similarity.hpp"

namespace creativity {

enum class UnexpectednessMeasure { max, mean, inverse_weighted };
enum class EmptyWindowPolicy { zero, flag };

std::string_view to_string(UnexpectednessMeasure measure);
UnexpectednessMeasure parse_measure(std::string_view text);
EmptyWindowPolicy parse_empty_window_policy(std::string_view text);
std::string_view to_string(EmptyWindowPolicy policy);

struct UnexpectednessConfig {
    int window_years = 5;
    UnexpectednessMeasure measure = UnexpectednessMeasure::mean;
    EmptyWindowPolicy empty_window_policy = EmptyWindowPolicy::zero;

    void validate() const;
};

// Indices j with t(i) - window <= t(j) < t(i), ascending.
std::vector<Eigen::Index> predecessor_window(Eigen::Index i, std::span<const int> times, int window_years);

// Score of one artifact; nullopt when the window is empty.
std::optional<double> unexpectedness_score(Eigen::Index i, const Matrix& similarity, std::span<const int> times,
                                           const UnexpectednessConfig& config);

struct UnexpectednessVector {
    // Empty windows hold 0 under the zero policy and NaN under the flag policy.
    Vector values;
    std::vector<bool> empty_window;
};

UnexpectednessVector unexpectedness_vector(const Matrix& similarity, std::span<const int> times,
                                           const UnexpectednessConfig& config);

}  // namespace creativity
