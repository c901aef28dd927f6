#pragma once

#include <memory>
#include <mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "ddqncd/dag.hpp"
#include "ddqncd/dataset.hpp"

namespace ddqncd {

// S_n(A) = loglik - penalty, penalty = k/2 * log n.
struct ScoreValue {
    double total = 0.0;
    double loglik = 0.0;
    double penalty = 0.0;
    long long k = 0;
    // A residual variance hit the 1e-12 floor somewhere.
    bool clamped = false;
};

// One node's share of a decomposable score.
struct NodeScore {
    double loglik = 0.0;
    long long k = 0;
    bool clamped = false;

    double local(double log_n) const { return loglik - 0.5 * static_cast<double>(k) * log_n; }
};

inline constexpr double kVarianceFloor = 1e-12;
inline constexpr double kPinvCutoff = 1e-10;
inline constexpr int kMaxDiscreteParents = 20;

// Gaussian node term: OLS of column j on its parents without intercept,
// sigma^2 = RSS/n, loglik = -(n/2)(log(2 pi sigma^2) + 1), k = |Pa| + 1.
// The normal equations are solved from the Gram matrix with a symmetric
// pseudo-inverse (eigenvalues of X^T X / n below 1e-10 dropped).
NodeScore gaussian_node_score(const ScoredDataset& data, int j, std::span<const int> parents);

// Binary node term: sum n_{pi,k} log(n_{pi,k} / n_pi) over observed parent
// configurations, k = 2^|Pa|. Refuses more than 20 parents.
NodeScore discrete_node_score(const ScoredDataset& data, int j, std::span<const int> parents);

NodeScore node_score(const ScoredDataset& data, int j, std::span<const int> parents);

ScoreValue gaussian_bic(const ScoredDataset& data, const Dag& g);
ScoreValue discrete_bic(const ScoredDataset& data, const Dag& g);
// Dispatches on data.kind().
ScoreValue score(const ScoredDataset& data, const Dag& g);

// score(apply_edit(g, e)) - score(g), refitting only the nodes whose parent
// sets change. Throws EditRejected when e is not a legal edit (no budget limit).
double delta_score(const ScoredDataset& data, const Dag& g, const EdgeEdit& e);

// OLS coefficients (no intercept) of column j on `parents`, in parent order.
std::vector<double> ols_coefficients(const ScoredDataset& data, int j, std::span<const int> parents);

// Memoizing scorer over one immutable dataset. Node terms are cached by
// (node, parent set); concurrent calls are safe.
class Scorer {
public:
    explicit Scorer(std::shared_ptr<const ScoredDataset> data);

    const ScoredDataset& data() const { return *data_; }
    const std::shared_ptr<const ScoredDataset>& data_ptr() const { return data_; }
    double log_n() const { return log_n_; }

    NodeScore node(int j, std::span<const int> parents) const;
    ScoreValue score(const Dag& g) const;
    double delta(const Dag& g, const EdgeEdit& e) const;

    std::size_t cache_size() const;

private:
    struct Key {
        std::vector<std::uint64_t> words;
        friend bool operator==(const Key&, const Key&) = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const;
    };

    Key make_key(int j, std::span<const int> parents) const;

    std::shared_ptr<const ScoredDataset> data_;
    double log_n_ = 0.0;
    mutable std::mutex mutex_;
    mutable std::unordered_map<Key, NodeScore, KeyHash> cache_;
};

}  // namespace ddqncd
