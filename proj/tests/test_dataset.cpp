#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "creativity/dataset.hpp"
#include "creativity/errors.hpp"
#include "support/oracles.hpp"

using namespace creativity;

namespace {

const char* kSchema = R"({
  "attributes": [
    {"name": "budget", "kind": "numeric", "similarity": "linear"},
    {"name": "plot", "kind": "vector", "dimension": 3, "similarity": "cosine"}
  ],
  "labels": [{"name": "rating", "max": 10}]
})";

class IngestTest : public ::testing::Test {
protected:
    void SetUp() override {
        std::istringstream in(kSchema);
        schema_ = parse_schema(in);
    }

    LoadResult load(const std::string& table, const std::string& vectors) const {
        std::istringstream t(table);
        std::istringstream v(vectors);
        return load_corpus(t, v, schema_);
    }

    Schema schema_;
};

}  // namespace

TEST_F(IngestTest, ThreeRowsAllYears) {
    const auto r = load("id,year,budget,rating\na,2000,1.5,7\nb,2001,,8\nc,2003,2,6\n",
                        R"({"id":"a","attribute":"plot","vector":[1,0,0]})"
                        "\n"
                        R"({"id":"c","attribute":"plot","vector":[0,1,0]})"
                        "\n");
    ASSERT_EQ(r.corpus.size(), 3u);
    EXPECT_EQ(r.report.rows_read, 3u);
    EXPECT_EQ(r.corpus.years(), (std::vector<int>{2000, 2001, 2003}));
    EXPECT_TRUE(is_missing(r.corpus.artifacts[1].values[0]));
    EXPECT_TRUE(is_missing(r.corpus.artifacts[1].values[1]));
    EXPECT_DOUBLE_EQ(r.corpus.label("rating").values[2], 6.0);
    EXPECT_DOUBLE_EQ(r.corpus.label("rating").maximum, 10.0);
}

TEST_F(IngestTest, EmptyYearIsDroppedAndCounted) {
    const auto r = load("id,year,budget,rating\na,2000,1,7\nb,,2,8\n", "");
    EXPECT_EQ(r.corpus.size(), 1u);
    EXPECT_EQ(r.report.dropped_missing_year, 1u);
}

TEST_F(IngestTest, VectorForDroppedRowIsIgnored) {
    const auto r = load("id,year,budget,rating\na,2000,1,7\nb,,2,8\n",
                        R"({"id":"b","attribute":"plot","vector":[1,2,3]})");
    EXPECT_EQ(r.corpus.size(), 1u);
}

TEST_F(IngestTest, EmptyLabelIsDroppedAndCounted) {
    const auto r = load("id,year,budget,rating\na,2000,1,\nb,2001,2,8\n", "");
    EXPECT_EQ(r.corpus.size(), 1u);
    EXPECT_EQ(r.report.dropped_missing_label, 1u);
}

TEST_F(IngestTest, ShortVectorIsSchemaError) {
    EXPECT_THROW(load("id,year,budget,rating\na,2000,1,7\n", R"({"id":"a","attribute":"plot","vector":[1,2]})"),
                 SchemaError);
}

TEST_F(IngestTest, DuplicateIdIsIntegrityError) {
    EXPECT_THROW(load("id,year,budget,rating\na,2000,1,7\na,2001,2,8\n", ""), IntegrityError);
}

TEST_F(IngestTest, DuplicateVectorRecordIsIntegrityError) {
    EXPECT_THROW(load("id,year,budget,rating\na,2000,1,7\n",
                      R"({"id":"a","attribute":"plot","vector":[1,2,3]})"
                      "\n"
                      R"({"id":"a","attribute":"plot","vector":[1,2,3]})"),
                 IntegrityError);
}

TEST_F(IngestTest, UnknownVectorIdIsIntegrityError) {
    EXPECT_THROW(load("id,year,budget,rating\na,2000,1,7\n", R"({"id":"z","attribute":"plot","vector":[1,2,3]})"),
                 IntegrityError);
}

TEST_F(IngestTest, MalformedNumberReportsLine) {
    try {
        load("id,year,budget,rating\na,2000,1,7\nb,2001,abc,8\n", "");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST_F(IngestTest, QuotedFieldsAndExtraColumns) {
    const auto r = load("id,year,note,budget,rating\n\"x,1\",1999,\"hello, world\",4,5\n", "");
    ASSERT_EQ(r.corpus.size(), 1u);
    EXPECT_EQ(r.corpus.artifacts[0].id, "x,1");
    EXPECT_DOUBLE_EQ(std::get<double>(r.corpus.artifacts[0].values[0]), 4.0);
}

TEST_F(IngestTest, MissingHeaderColumnIsSchemaError) {
    EXPECT_THROW(load("id,year,rating\na,2000,7\n", ""), SchemaError);
}

TEST(SchemaTest, KernelMustMatchKind) {
    std::istringstream in(R"([{"name": "x", "kind": "numeric", "similarity": "cosine"}])");
    EXPECT_THROW(parse_schema(in), SchemaError);
}

TEST(SchemaTest, NumericKernels) {
    AttributeSpec numeric{"x", AttributeKind::numeric, 1, Kernel::linear};
    EXPECT_EQ(numeric.kernels(), (std::vector<Kernel>{Kernel::linear, Kernel::exponential}));
    AttributeSpec vec{"v", AttributeKind::vector, 3, Kernel::cosine};
    EXPECT_EQ(vec.kernels(), (std::vector<Kernel>{Kernel::cosine}));
}

class PreprocessTest : public ::testing::Test {
protected:
    static Corpus numeric_corpus(const std::vector<AttributeValue>& values) {
        Corpus c;
        c.attributes.push_back({"x", AttributeKind::numeric, 1, Kernel::linear});
        for (std::size_t i = 0; i < values.size(); ++i)
            c.artifacts.push_back({"a" + std::to_string(i), 2000 + static_cast<int>(i), {values[i]}});
        return c;
    }
};

TEST_F(PreprocessTest, NumericMissingTakesMean) {
    const auto c = impute(numeric_corpus({2.0, Missing{}, 4.0}));
    EXPECT_DOUBLE_EQ(std::get<double>(c.artifacts[1].values[0]), 3.0);
}

TEST_F(PreprocessTest, VectorMissingBecomesZero) {
    Corpus c;
    c.attributes.push_back({"v", AttributeKind::vector, 4, Kernel::cosine});
    c.artifacts.push_back({"a", 2000, {std::vector<double>{1, 2, 3, 4}}});
    c.artifacts.push_back({"b", 2001, {Missing{}}});
    const auto out = impute(c);
    EXPECT_EQ(std::get<std::vector<double>>(out.artifacts[1].values[0]), (std::vector<double>{0, 0, 0, 0}));
}

TEST_F(PreprocessTest, ImputeWithoutMissingIsIdentityAndIdempotent) {
    std::mt19937_64 rng(3);
    auto c = oracle::random_corpus(12, 3, rng);
    const auto once = impute(c);
    const auto twice = impute(once);
    for (std::size_t i = 0; i < c.size(); ++i) {
        EXPECT_EQ(once.artifacts[i].values, c.artifacts[i].values);
        EXPECT_EQ(twice.artifacts[i].values, once.artifacts[i].values);
    }
    c.artifacts[2].values[0] = Missing{};
    EXPECT_EQ(impute(impute(c)).artifacts[2].values, impute(c).artifacts[2].values);
}

TEST_F(PreprocessTest, AllMissingIsImputationError) {
    EXPECT_THROW(impute(numeric_corpus({Missing{}, Missing{}})), ImputationError);
}

TEST_F(PreprocessTest, NormalizeTwoValues) {
    const auto c = normalize_numeric(numeric_corpus({0.0, 2.0}));
    EXPECT_DOUBLE_EQ(std::get<double>(c.artifacts[0].values[0]), -1.0);
    EXPECT_DOUBLE_EQ(std::get<double>(c.artifacts[1].values[0]), 1.0);
}

TEST_F(PreprocessTest, ConstantNormalizesToZeros) {
    const auto c = normalize_numeric(numeric_corpus({5.0, 5.0, 5.0}));
    for (const auto& a : c.artifacts) EXPECT_EQ(std::get<double>(a.values[0]), 0.0);
}

TEST_F(PreprocessTest, NormalizeIsIdempotent) {
    const auto once = normalize_numeric(numeric_corpus({1.0, 4.0, -2.0, 7.5, 3.25}));
    const auto twice = normalize_numeric(once);
    for (std::size_t i = 0; i < once.size(); ++i)
        EXPECT_NEAR(std::get<double>(twice.artifacts[i].values[0]), std::get<double>(once.artifacts[i].values[0]),
                    1e-12);
}

// ---------------------------------------------------------------------------

namespace {

Matrix covariance(const Matrix& x) {
    const Matrix centered = x.rowwise() - x.colwise().mean();
    return centered.transpose() * centered / static_cast<double>(x.rows() - 1);
}

}  // namespace

TEST(PcaTest, RankOneDataKeepsOneComponent) {
    Matrix line(6, 2);
    for (int i = 0; i < 6; ++i) line.row(i) << i, 2.0 * i + 1.0;
    const auto pc = principal_components(line, 0.9);
    EXPECT_EQ(pc.components.cols(), 1);
    EXPECT_NEAR(pc.explained_fraction(), 1.0, 1e-12);
}

TEST(PcaTest, IsotropicGaussianKeepsBoth) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix x(400, 2);
    for (int i = 0; i < x.rows(); ++i) x.row(i) << n(rng), n(rng);
    Eigen::SelfAdjointEigenSolver<Matrix> dense(covariance(x));
    const double top = dense.eigenvalues()(1) / dense.eigenvalues().sum();
    ASSERT_LT(top, 0.9);
    EXPECT_EQ(principal_components(x, 0.9).components.cols(), 2);
}

TEST(PcaTest, EigenvaluesMatchDenseOracle) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        Matrix x(60, 5);
        for (int i = 0; i < x.rows(); ++i)
            for (int j = 0; j < x.cols(); ++j) x(i, j) = n(rng) * (j + 1);
        const auto pc = principal_components(x, 1.0);
        Eigen::SelfAdjointEigenSolver<Matrix> dense(covariance(x));
        const Vector expected = dense.eigenvalues().reverse();
        ASSERT_EQ(pc.eigenvalues.size(), 5);
        for (int k = 0; k < 5; ++k) EXPECT_NEAR(pc.eigenvalues[k], expected[k], 1e-8 * expected[0]);
        EXPECT_NEAR(pc.total_variance, expected.sum(), 1e-9 * expected.sum());
    }
}

TEST(PcaTest, WideBlockMatchesDenseOracle) {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix x(6, 20);
    for (int i = 0; i < x.rows(); ++i)
        for (int j = 0; j < x.cols(); ++j) x(i, j) = n(rng);
    const auto pc = principal_components(x, 1.0);
    Eigen::SelfAdjointEigenSolver<Matrix> dense(covariance(x));
    const Vector expected = dense.eigenvalues().reverse();
    for (int k = 0; k < pc.eigenvalues.size(); ++k) EXPECT_NEAR(pc.eigenvalues[k], expected[k], 1e-8 * expected[0]);
    EXPECT_LE(pc.eigenvalues.size(), 5);
}

TEST(PcaTest, ComponentsOrthonormalAndReconstruct) {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix x(80, 6);
    for (int i = 0; i < x.rows(); ++i)
        for (int j = 0; j < x.cols(); ++j) x(i, j) = n(rng) + 0.5 * j * n(rng);
    const auto pc = principal_components(x, 1.0);
    ASSERT_EQ(pc.components.cols(), 6);
    const Matrix gram = pc.components.transpose() * pc.components;
    EXPECT_LT((gram - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-8);
    const Matrix centered = x.rowwise() - pc.mean.transpose();
    const Matrix back = pc.project(x) * pc.components.transpose();
    EXPECT_LT((back - centered).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(PcaTest, RetainsMinimalComponentCount) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix x(100, 8);
    for (int i = 0; i < x.rows(); ++i)
        for (int j = 0; j < x.cols(); ++j) x(i, j) = n(rng) * std::pow(0.7, j);
    for (double fraction : {0.5, 0.75, 0.9, 0.99}) {
        const auto pc = principal_components(x, fraction);
        const double kept = pc.eigenvalues.sum() / pc.total_variance;
        const double without_last =
            (pc.eigenvalues.sum() - pc.eigenvalues[pc.eigenvalues.size() - 1]) / pc.total_variance;
        EXPECT_GE(kept, fraction - 1e-10);
        EXPECT_LT(without_last, fraction);
    }
}

TEST(PcaTest, FractionOutsideRangeThrows) {
    Matrix x = Matrix::Random(5, 2);
    EXPECT_THROW(principal_components(x, 0.0), ArgumentError);
    EXPECT_THROW(principal_components(x, 1.5), ArgumentError);
}

TEST(PcaTest, ValueFeaturesLayout) {
    std::mt19937_64 rng(4);
    const auto c = normalize_numeric(impute(oracle::random_corpus(30, 3, rng)));
    const auto v = pca_value_features(c, 0.9);
    ASSERT_EQ(v.per_attribute_spans.size(), 3u);
    EXPECT_EQ(v.per_attribute_spans[0].width, 1u);
    EXPECT_EQ(v.per_attribute_spans[2].width, 1u);
    std::size_t width = 0;
    for (const auto& s : v.per_attribute_spans) width += s.width;
    EXPECT_EQ(static_cast<Eigen::Index>(width), v.matrix.cols());
    EXPECT_EQ(v.column_names.size(), width);
    EXPECT_GE(v.explained_variance[1], 0.9 - 1e-10);
    for (Eigen::Index i = 0; i < v.matrix.rows(); ++i)
        EXPECT_EQ(v.matrix(i, 0), std::get<double>(c.artifacts[static_cast<std::size_t>(i)].values[0]));
}
