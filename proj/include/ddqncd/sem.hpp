#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "ddqncd/dag.hpp"

namespace ddqncd {

// Linear-Gaussian SEM generator settings.
struct SemSpec {
    int p = 30;
    double expected_in_degree = 3.0;
    double weight_low = 0.5;
    double weight_high = 1.0;
    bool random_sign = true;
    std::uint64_t seed = 0;

    // Throws ConfigError when an invariant is violated.
    void validate() const;
    // min(1, 2 * expected_in_degree / (p - 1)); 0 when p < 2.
    double edge_probability() const;
};

struct WeightedDag {
    Dag dag;
    // weights(i, j) != 0 iff dag.has_edge(i, j).
    Eigen::MatrixXd weights;
};

// Random permutation as causal order; each earlier->later pair is an edge
// independently with edge_probability(); |weight| ~ U[low, high], sign
// flipped with probability 1/2 when random_sign.
WeightedDag random_dag(const SemSpec& spec);

// n x p matrix of i.i.d. standard normals, drawn row by row.
Eigen::MatrixXd draw_noise(int n, int p, std::uint64_t seed);

// x_j = sum_i W(i, j) x_i + e_j solved by forward substitution in
// topological order, with e = draw_noise(n, p, seed).
Eigen::MatrixXd simulate_sem(const WeightedDag& sem, int n, std::uint64_t seed);

struct RowSplit {
    std::vector<int> train_rows;
    std::vector<int> pool_rows;
    Eigen::MatrixXd train;
    Eigen::MatrixXd pool;
};

// Seeded random row partition; the training part gets round(fraction * n) rows.
RowSplit split_rows(const Eigen::MatrixXd& data, double train_fraction, std::uint64_t seed);

}  // namespace ddqncd
