#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "creativity/errors.hpp"
#include "creativity/experiments.hpp"

namespace creativity {

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw ArgumentError(fmt::format("pearson of series with lengths {} and {}", x.size(), y.size()));
    if (x.size() < 2) throw ArgumentError("pearson needs at least two samples");
    // Single pass with running co-moments.
    double mean_x = 0.0;
    double mean_y = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double n = static_cast<double>(i + 1);
        const double dx = x[i] - mean_x;
        const double dy = y[i] - mean_y;
        mean_x += dx / n;
        mean_y += dy / n;
        sxx += dx * (x[i] - mean_x);
        syy += dy * (y[i] - mean_y);
        sxy += dx * (y[i] - mean_y);
    }
    if (sxx <= 0.0 || syy <= 0.0) throw UndefinedCorrelation("pearson correlation of a constant series");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double improvement_percent(double baseline_rmse, double best_rmse) {
    if (!(baseline_rmse > 0.0)) throw ArgumentError("baseline RMSE must be positive");
    return (baseline_rmse - best_rmse) / baseline_rmse * 100.0;
}

}  // namespace creativity
