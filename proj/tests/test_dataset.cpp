#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "ddqncd/dataset.hpp"
#include "ddqncd/errors.hpp"
#include "ddqncd/normal.hpp"
#include "oracles.hpp"

using namespace ddqncd;

TEST(Normal, QuantileMatchesBisectionOracle) {
    for (double u : {1e-12, 1e-6, 0.001, 0.02425, 0.1, 1.0 / 6.0, 0.3, 0.5, 0.7, 5.0 / 6.0, 0.97575, 0.999, 1 - 1e-9}) {
        EXPECT_NEAR(normal_quantile(u), oracle::normal_quantile(u), 1e-10) << "u=" << u;
    }
    // Frozen from the bisection oracle.
    EXPECT_NEAR(normal_quantile(5.0 / 6.0), 0.96742156610170, 1e-12);
    EXPECT_EQ(normal_quantile(0.5), 0.0);
    EXPECT_THROW(normal_quantile(0.0), std::domain_error);
    EXPECT_THROW(normal_quantile(1.0), std::domain_error);
}

TEST(RankGaussian, ThreeValues) {
    Eigen::MatrixXd raw(3, 1);
    raw << 1, 2, 3;
    const auto z = rank_gaussian_transform(raw);
    EXPECT_NEAR(z(0, 0), oracle::normal_quantile(1.0 / 6.0), 1e-12);
    EXPECT_EQ(z(1, 0), 0.0);
    EXPECT_NEAR(z(2, 0), 0.96742156610170, 1e-12);
}

TEST(RankGaussian, TiesAverageAndMatchOracle) {
    Eigen::MatrixXd raw(6, 2);
    raw << 3, 1, 1, 1, 2, 5, 2, -1, 9, 0, 2, 7;
    const auto z = rank_gaussian_transform(raw);
    const auto ref = oracle::rank_gaussian(raw);
    for (Eigen::Index r = 0; r < 6; ++r)
        for (Eigen::Index c = 0; c < 2; ++c) EXPECT_NEAR(z(r, c), ref(r, c), 1e-10);
    EXPECT_EQ(z(2, 0), z(3, 0));
    EXPECT_EQ(z(3, 0), z(5, 0));
}

TEST(RankGaussian, MonotoneInvarianceIsExact) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    Eigen::MatrixXd raw(200, 3);
    for (Eigen::Index r = 0; r < raw.rows(); ++r)
        for (Eigen::Index c = 0; c < raw.cols(); ++c) raw(r, c) = nd(rng);
    Eigen::MatrixXd mapped = raw;
    mapped.col(0) = raw.col(0).array().exp();
    mapped.col(1) = raw.col(1).array().cube() * 4.0 - 1.0;
    mapped.col(2) = raw.col(2).array().unaryExpr([](double v) { return std::atan(v); });
    EXPECT_EQ(rank_gaussian_transform(raw), rank_gaussian_transform(mapped));
}

TEST(RankGaussian, UntiedColumnCenteredTiedColumnMatchesOracle) {
    std::mt19937_64 rng(9);
    std::exponential_distribution<double> ex(1.0);
    Eigen::MatrixXd raw(101, 2);
    for (Eigen::Index r = 0; r < raw.rows(); ++r) raw.row(r) << ex(rng), std::round(ex(rng) * 3);
    const auto z = rank_gaussian_transform(raw);
    EXPECT_NEAR(z.col(0).mean(), 0.0, 1e-12);
    // Averaged ranks of ties are not symmetric, so only the oracle comparison holds.
    EXPECT_LE((z.col(1) - oracle::rank_gaussian(raw).col(1)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(RankGaussian, Errors) {
    EXPECT_THROW(rank_gaussian_transform(Eigen::MatrixXd::Ones(2, 1)), DataError);
    Eigen::MatrixXd raw(4, 2);
    raw << 1, 5, 2, 5, 3, 5, 4, 5;
    try {
        rank_gaussian_transform(raw);
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("column 2"), std::string::npos);
    }
}

TEST(ScoredDataset, DetectKinds) {
    Eigen::MatrixXd bin(4, 2);
    bin << 0, 1, 1, 1, 0, 0, 1, 0;
    EXPECT_EQ(ScoredDataset::detect(bin).kind(), DataKind::DiscreteBinary);
    Eigen::MatrixXd cont(4, 2);
    cont << 0.1, 2, 0.5, 3, -1, 4, 2, 8;
    const auto d = ScoredDataset::detect(cont, {"a", "b"});
    EXPECT_EQ(d.kind(), DataKind::CopulaGaussian);
    EXPECT_EQ(d.names()[1], "b");
    EXPECT_EQ(d.gram().rows(), 2);
    Eigen::MatrixXd mixed(4, 2);
    mixed << 0, 2.5, 1, 3, 0, 4, 1, 8;
    EXPECT_THROW(ScoredDataset::detect(mixed), DataError);
    EXPECT_THROW(ScoredDataset::binary(cont), DataError);
}

TEST(DatasetCsv, ParsesAndDiagnoses) {
    std::stringstream ok("x,y\n1,2\n3,4.5\n");
    const RawTable t = read_dataset_csv(ok);
    EXPECT_EQ(t.names, (std::vector<std::string>{"x", "y"}));
    EXPECT_EQ(t.values(1, 1), 4.5);

    std::stringstream nan_cell("x,y\n1,2\n3,NaN\n");
    try {
        read_dataset_csv(nan_cell);
        FAIL();
    } catch (const DataError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("row 2"), std::string::npos) << msg;
        EXPECT_NE(msg.find("column 2"), std::string::npos) << msg;
    }
    std::stringstream blank("x,y\n1,\n");
    EXPECT_THROW(read_dataset_csv(blank), DataError);
    std::stringstream ragged("x,y\n1,2,3\n");
    EXPECT_THROW(read_dataset_csv(ragged), DataError);
}

TEST(DatasetCsv, WriteReadRoundTripIsExact) {
    Eigen::MatrixXd v(2, 2);
    v << 0.1, -1.0 / 3.0, 1e-300, 12345.678901234567;
    std::stringstream ss;
    write_dataset_csv(ss, v);
    const RawTable t = read_dataset_csv(ss);
    EXPECT_EQ(t.values, v);
    EXPECT_EQ(t.names, (std::vector<std::string>{"X0", "X1"}));
}
