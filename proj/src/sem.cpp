#include "ddqncd/sem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ddqncd/errors.hpp"
#include "ddqncd/rng.hpp"

namespace ddqncd {

void SemSpec::validate() const {
    if (p < 1) throw ConfigError("sem.p must be positive");
    if (!(weight_low > 0.0 && weight_low <= weight_high)) throw ConfigError("sem weights need 0 < low <= high");
    if (!(expected_in_degree >= 0.0 && expected_in_degree < p))
        throw ConfigError("sem.expected_in_degree must lie in [0, p)");
}

double SemSpec::edge_probability() const {
    if (p < 2) return 0.0;
    return std::min(1.0, expected_in_degree * 2.0 / (p - 1));
}

WeightedDag random_dag(const SemSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    std::vector<int> order(spec.p);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    std::bernoulli_distribution include(spec.edge_probability());
    std::uniform_real_distribution<double> magnitude(spec.weight_low, spec.weight_high);
    std::bernoulli_distribution flip(0.5);

    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(spec.p, spec.p);
    std::vector<std::pair<int, int>> edges;
    for (int a = 0; a < spec.p; ++a)
        for (int b = a + 1; b < spec.p; ++b) {
            if (!include(rng)) continue;
            double w = magnitude(rng);
            if (spec.random_sign && flip(rng)) w = -w;
            W(order[a], order[b]) = w;
            edges.emplace_back(order[a], order[b]);
        }
    return {Dag::from_edges(spec.p, edges), W};
}

Eigen::MatrixXd draw_noise(int n, int p, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd e(n, p);
    for (int t = 0; t < n; ++t)
        for (int j = 0; j < p; ++j) e(t, j) = normal(rng);
    return e;
}

Eigen::MatrixXd simulate_sem(const WeightedDag& sem, int n, std::uint64_t seed) {
    const int p = sem.dag.p();
    if (sem.weights.rows() != p || sem.weights.cols() != p) throw DataError("SEM weight matrix has wrong shape");
    Eigen::MatrixXd x = draw_noise(n, p, seed);
    const auto order = topological_order(sem.dag);
    for (int j : order) {
        const auto parents = sem.dag.parents(j);
        if (parents.empty()) continue;
        for (int t = 0; t < n; ++t) {
            double s = 0.0;
            for (int i : parents) s += sem.weights(i, j) * x(t, i);
            x(t, j) = s + x(t, j);
        }
    }
    return x;
}

RowSplit split_rows(const Eigen::MatrixXd& data, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ConfigError("train fraction must lie in (0, 1)");
    const int n = static_cast<int>(data.rows());
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    const int n_train = static_cast<int>(std::lround(train_fraction * n));

    RowSplit s;
    s.train_rows.assign(idx.begin(), idx.begin() + n_train);
    s.pool_rows.assign(idx.begin() + n_train, idx.end());
    std::sort(s.train_rows.begin(), s.train_rows.end());
    std::sort(s.pool_rows.begin(), s.pool_rows.end());
    s.train = data(s.train_rows, Eigen::all);
    s.pool = data(s.pool_rows, Eigen::all);
    return s;
}

}  // namespace ddqncd
