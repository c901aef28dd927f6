#include <gtest/gtest.h>

#include <set>

#include "ddqncd/errors.hpp"
#include "ddqncd/sem.hpp"
#include "oracles.hpp"

using namespace ddqncd;

TEST(SemSpec, Validation) {
    SemSpec s;
    EXPECT_NO_THROW(s.validate());
    s.weight_low = 0.0;
    EXPECT_THROW(s.validate(), ConfigError);
    s = SemSpec{};
    s.weight_low = 2.0;
    EXPECT_THROW(s.validate(), ConfigError);
    s = SemSpec{};
    s.p = 3;
    EXPECT_THROW(s.validate(), ConfigError);
    EXPECT_DOUBLE_EQ(SemSpec{}.edge_probability(), 6.0 / 29.0);
}

TEST(RandomDag, ForcedEdgeOnTwoNodes) {
    SemSpec s;
    s.p = 2;
    s.expected_in_degree = 1.0;  // probability min(1, 2) = 1
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        s.seed = seed;
        const auto w = random_dag(s);
        EXPECT_EQ(w.dag.edge_count(), 1);
        for (auto [i, j] : w.dag.edges()) {
            EXPECT_GE(std::abs(w.weights(i, j)), 0.5);
            EXPECT_LE(std::abs(w.weights(i, j)), 1.0);
        }
    }
}

TEST(RandomDag, MeanInDegreeIsThree) {
    SemSpec s;
    double total = 0.0;
    bool saw_negative = false;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        s.seed = seed;
        const auto w = random_dag(s);
        EXPECT_TRUE(oracle::acyclic(w.dag.to_matrix()));
        for (int i = 0; i < s.p; ++i)
            for (int j = 0; j < s.p; ++j) EXPECT_EQ(w.weights(i, j) != 0.0, w.dag.has_edge(i, j));
        saw_negative = saw_negative || (w.weights.array() < 0).any();
        total += static_cast<double>(w.dag.edge_count()) / s.p;
    }
    EXPECT_NEAR(total / 200.0, 3.0, 0.3);
    EXPECT_TRUE(saw_negative);
}

TEST(RandomDag, Deterministic) {
    SemSpec s;
    s.seed = 99;
    const auto a = random_dag(s), b = random_dag(s);
    EXPECT_EQ(a.dag, b.dag);
    EXPECT_EQ(a.weights, b.weights);
    EXPECT_EQ(simulate_sem(a, 50, 3), simulate_sem(b, 50, 3));
}

TEST(Simulate, SubstitutionRecoversNoise) {
    SemSpec s;
    s.p = 12;
    s.seed = 4;
    const auto w = random_dag(s);
    const auto x = simulate_sem(w, 300, 8);
    const auto e = draw_noise(300, 12, 8);
    EXPECT_LE((x - x * w.weights - e).cwiseAbs().maxCoeff(), 1e-12);

    const WeightedDag empty{Dag(3), Eigen::MatrixXd::Zero(3, 3)};
    EXPECT_EQ(simulate_sem(empty, 10, 5), draw_noise(10, 3, 5));
}

TEST(Simulate, TwoNodeVariance) {
    WeightedDag w{Dag::from_edges(2, {{0, 1}}), Eigen::MatrixXd::Zero(2, 2)};
    w.weights(0, 1) = 1.0;
    const auto x = simulate_sem(w, 100000, 6);
    const double var1 = x.col(1).squaredNorm() / x.rows() - std::pow(x.col(1).mean(), 2);
    EXPECT_NEAR(var1, 2.0, 0.05);
}

TEST(Simulate, ChainCovarianceMatchesClosedForm) {
    WeightedDag w{Dag::from_edges(3, {{0, 1}, {1, 2}}), Eigen::MatrixXd::Zero(3, 3)};
    w.weights(0, 1) = 0.8;
    w.weights(1, 2) = 0.8;
    const auto x = simulate_sem(w, 100000, 7);
    const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
    const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(x.rows());
    const Eigen::MatrixXd inv = (Eigen::MatrixXd::Identity(3, 3) - w.weights).inverse();
    const Eigen::MatrixXd truth = inv.transpose() * inv;
    EXPECT_LE((cov - truth).cwiseAbs().maxCoeff(), 0.02);
}

TEST(Split, SizesDisjointDeterministic) {
    const Eigen::MatrixXd data = draw_noise(10, 2, 1);
    const auto s = split_rows(data, 0.5, 3);
    EXPECT_EQ(s.train_rows.size(), 5u);
    EXPECT_EQ(s.pool_rows.size(), 5u);
    std::set<int> all(s.train_rows.begin(), s.train_rows.end());
    all.insert(s.pool_rows.begin(), s.pool_rows.end());
    EXPECT_EQ(all.size(), 10u);
    EXPECT_EQ(s.train.row(0), data.row(s.train_rows[0]));
    const auto again = split_rows(data, 0.5, 3);
    EXPECT_EQ(again.train_rows, s.train_rows);
    const auto big = split_rows(draw_noise(1000, 1, 2), 0.7, 4);
    EXPECT_EQ(big.train_rows.size(), 700u);
    EXPECT_EQ(big.pool_rows.size(), 300u);
    EXPECT_THROW(split_rows(data, 1.0, 3), ConfigError);
}
