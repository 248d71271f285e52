#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "creativity/errors.hpp"
#include "creativity/unexpectedness.hpp"
#include "support/oracles.hpp"

using namespace creativity;

namespace {

UnexpectednessConfig config_for(UnexpectednessMeasure measure, int window = 5) {
    UnexpectednessConfig c;
    c.measure = measure;
    c.window_years = window;
    return c;
}

oracle::Measure to_oracle(UnexpectednessMeasure m) {
    switch (m) {
        case UnexpectednessMeasure::max: return oracle::Measure::max;
        case UnexpectednessMeasure::mean: return oracle::Measure::mean;
        case UnexpectednessMeasure::inverse_weighted: return oracle::Measure::inverse_weighted;
    }
    return oracle::Measure::mean;
}

constexpr UnexpectednessMeasure kMeasures[] = {UnexpectednessMeasure::max, UnexpectednessMeasure::mean,
                                               UnexpectednessMeasure::inverse_weighted};

}  // namespace

TEST(WindowTest, Examples) {
    const std::vector<int> t{2000, 1994, 1996, 1999, 2000, 2001};
    EXPECT_EQ(predecessor_window(0, t, 5), (std::vector<Eigen::Index>{2, 3}));
    EXPECT_TRUE(predecessor_window(1, t, 5).empty());
    const std::vector<int> adjacent{2000, 2001};
    EXPECT_EQ(predecessor_window(1, adjacent, 1), (std::vector<Eigen::Index>{0}));
}

TEST(ScoreTest, Examples) {
    const std::vector<int> t{1999, 2000};
    EXPECT_EQ(unexpectedness_score(1, Matrix::Ones(2, 2), t, config_for(UnexpectednessMeasure::max)).value(), -1.0);

    Matrix s = Matrix::Ones(3, 3);
    s(2, 0) = s(0, 2) = 0.2;
    s(2, 1) = s(1, 2) = 0.6;
    const std::vector<int> t3{1998, 1999, 2000};
    EXPECT_NEAR(unexpectedness_score(2, s, t3, config_for(UnexpectednessMeasure::mean)).value(), -0.4, 1e-12);

    Matrix w = Matrix::Ones(3, 3);
    w(2, 0) = w(0, 2) = 0.8;
    w(2, 1) = w(1, 2) = 0.4;
    const std::vector<int> tw{1999, 1996, 2000};
    EXPECT_NEAR(unexpectedness_score(2, w, tw, config_for(UnexpectednessMeasure::inverse_weighted)).value(), -0.72,
                1e-12);
}

TEST(ScoreTest, EmptyWindowPolicies) {
    const std::vector<int> same(3, 2000);
    auto zero = unexpectedness_vector(Matrix::Ones(3, 3), same, config_for(UnexpectednessMeasure::mean));
    for (int i = 0; i < 3; ++i) {
        EXPECT_TRUE(zero.empty_window[i]);
        EXPECT_EQ(zero.values[i], 0.0);
    }
    auto cfg = config_for(UnexpectednessMeasure::mean);
    cfg.empty_window_policy = EmptyWindowPolicy::flag;
    auto flagged = unexpectedness_vector(Matrix::Ones(3, 3), same, cfg);
    for (int i = 0; i < 3; ++i) {
        EXPECT_TRUE(flagged.empty_window[i]);
        EXPECT_TRUE(std::isnan(flagged.values[i]));
    }
}

TEST(ScoreTest, TwoDistinctYears) {
    const std::vector<int> t{2001, 2000};
    const auto u = unexpectedness_vector(Matrix::Constant(2, 2, 0.5), t, config_for(UnexpectednessMeasure::mean));
    EXPECT_FALSE(u.empty_window[0]);
    EXPECT_TRUE(u.empty_window[1]);
    EXPECT_EQ(u.values[0], -0.5);
}

TEST(ScoreTest, InvalidWindowThrows) {
    EXPECT_THROW(config_for(UnexpectednessMeasure::max, 0).validate(), ArgumentError);
    EXPECT_THROW(parse_measure("median"), ArgumentError);
}

class RandomUnexpectednessTest : public ::testing::TestWithParam<int> {
protected:
    void SetUp() override {
        std::mt19937_64 rng(500 + GetParam());
        s_ = oracle::random_similarity(20, rng);
        t_ = oracle::random_years(20, 1990, 12, rng);
    }

    oracle::Dense s_;
    std::vector<int> t_;
};

TEST_P(RandomUnexpectednessTest, MatchesOracleBitwise) {
    const Matrix s = oracle::to_eigen(s_);
    for (auto measure : kMeasures) {
        const auto u = unexpectedness_vector(s, t_, config_for(measure));
        for (std::size_t i = 0; i < t_.size(); ++i) {
            bool empty = false;
            const double expected = oracle::unexpectedness(i, s_, t_, 5, to_oracle(measure), empty);
            EXPECT_EQ(u.empty_window[i], empty);
            EXPECT_EQ(u.values[static_cast<Eigen::Index>(i)], expected);
        }
    }
}

TEST_P(RandomUnexpectednessTest, RangeWithinMinusOneZero) {
    const Matrix s = oracle::to_eigen(s_);
    for (auto measure : kMeasures) {
        const auto u = unexpectedness_vector(s, t_, config_for(measure));
        EXPECT_GE(u.values.minCoeff(), -1.0);
        EXPECT_LE(u.values.maxCoeff(), 0.0);
    }
}

TEST_P(RandomUnexpectednessTest, WindowLocality) {
    const Matrix s = oracle::to_eigen(s_);
    for (auto measure : kMeasures) {
        const auto cfg = config_for(measure);
        for (Eigen::Index i = 0; i < s.rows(); ++i) {
            const auto window = predecessor_window(i, t_, cfg.window_years);
            Matrix perturbed = s;
            for (Eigen::Index j = 0; j < s.cols(); ++j)
                if (std::find(window.begin(), window.end(), j) == window.end()) perturbed(i, j) = perturbed(j, i) = 0.123;
            EXPECT_EQ(unexpectedness_score(i, perturbed, t_, cfg), unexpectedness_score(i, s, t_, cfg));
        }
    }
}

TEST_P(RandomUnexpectednessTest, MaxIsMonotone) {
    Matrix s = oracle::to_eigen(s_);
    const auto cfg = config_for(UnexpectednessMeasure::max);
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
        const auto window = predecessor_window(i, t_, cfg.window_years);
        if (window.empty()) continue;
        const double before = *unexpectedness_score(i, s, t_, cfg);
        Matrix raised = s;
        raised(i, window.front()) = std::min(1.0, raised(i, window.front()) + 0.25);
        EXPECT_LE(*unexpectedness_score(i, raised, t_, cfg), before);
    }
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomUnexpectednessTest, ::testing::Range(0, 8));

TEST(ScoreTest, MeanEqualsInverseWeightedForSharedOffset) {
    std::mt19937_64 rng(3);
    const auto s = oracle::to_eigen(oracle::random_similarity(6, rng));
    const std::vector<int> t{2000, 2000, 2000, 2000, 2000, 2003};
    const auto mean = unexpectedness_score(5, s, t, config_for(UnexpectednessMeasure::mean));
    const auto inv = unexpectedness_score(5, s, t, config_for(UnexpectednessMeasure::inverse_weighted));
    EXPECT_NEAR(*mean, *inv, 1e-12);
}
