#include "ddqncd/score.hpp"

#include <algorithm>
#include <array>
#include <climits>
#include <cmath>
#include <numbers>
#include <string>

#include "ddqncd/errors.hpp"

namespace ddqncd {

namespace {

struct NodeChange {
    int node;
    std::vector<int> before;
    std::vector<int> after;
};

std::vector<int> without(std::vector<int> v, int x) {
    v.erase(std::remove(v.begin(), v.end(), x), v.end());
    return v;
}

std::vector<int> with(std::vector<int> v, int x) {
    v.insert(std::upper_bound(v.begin(), v.end(), x), x);
    return v;
}

// Nodes whose parent sets differ between g and apply_edit(g, e).
std::vector<NodeChange> changed_nodes(const Dag& g, const EdgeEdit& e) {
    if (auto why = check_edit(g, e, INT_MAX)) throw EditRejected(*why);
    std::vector<NodeChange> out;
    auto pj = g.parents(e.j);
    switch (e.op) {
        case EditOp::Add: out.push_back({e.j, pj, with(pj, e.i)}); break;
        case EditOp::Remove: out.push_back({e.j, pj, without(pj, e.i)}); break;
        case EditOp::Reverse: {
            auto pi = g.parents(e.i);
            out.push_back({e.i, pi, with(pi, e.j)});
            out.push_back({e.j, pj, without(pj, e.i)});
            break;
        }
    }
    return out;
}

ScoreValue assemble(const ScoredDataset& data, const Dag& g, auto&& node_fn) {
    if (g.p() != data.p())
        throw DataError("graph has " + std::to_string(g.p()) + " nodes but dataset has " + std::to_string(data.p()) +
                        " columns");
    ScoreValue s;
    for (int j = 0; j < g.p(); ++j) {
        const auto pa = g.parents(j);
        const NodeScore ns = node_fn(j, std::span<const int>(pa));
        s.loglik += ns.loglik;
        s.k += ns.k;
        s.clamped = s.clamped || ns.clamped;
    }
    s.penalty = 0.5 * static_cast<double>(s.k) * std::log(static_cast<double>(data.n()));
    s.total = s.loglik - s.penalty;
    return s;
}

void check_node(const ScoredDataset& data, int j, std::span<const int> parents) {
    if (j < 0 || j >= data.p()) throw DataError("node index " + std::to_string(j) + " out of range");
    for (int q : parents)
        if (q < 0 || q >= data.p() || q == j) throw DataError("invalid parent " + std::to_string(q));
}

// Symmetric pseudo-inverse solve of C beta = c, dropping eigenvalues below the cutoff.
Eigen::VectorXd pinv_solve(const Eigen::MatrixXd& C, const Eigen::VectorXd& c) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
    const auto& vals = es.eigenvalues();
    const auto& vecs = es.eigenvectors();
    Eigen::VectorXd proj = vecs.transpose() * c;
    for (Eigen::Index k = 0; k < vals.size(); ++k) proj(k) = vals(k) < kPinvCutoff ? 0.0 : proj(k) / vals(k);
    return vecs * proj;
}

}  // namespace

NodeScore gaussian_node_score(const ScoredDataset& data, int j, std::span<const int> parents) {
    if (data.kind() != DataKind::CopulaGaussian) throw DataError("Gaussian BIC requires a continuous dataset");
    check_node(data, j, parents);
    const double n = data.n();
    const auto& G = data.gram();
    const Eigen::Index q = static_cast<Eigen::Index>(parents.size());

    double var = G(j, j) / n;
    if (q > 0) {
        Eigen::MatrixXd C(q, q);
        Eigen::VectorXd c(q);
        for (Eigen::Index a = 0; a < q; ++a) {
            c(a) = G(parents[a], j) / n;
            for (Eigen::Index b = 0; b < q; ++b) C(a, b) = G(parents[a], parents[b]) / n;
        }
        var -= c.dot(pinv_solve(C, c));
    }
    NodeScore ns;
    if (!(var >= kVarianceFloor)) {
        var = kVarianceFloor;
        ns.clamped = true;
    }
    ns.loglik = -0.5 * n * (std::log(2.0 * std::numbers::pi * var) + 1.0);
    ns.k = q + 1;
    return ns;
}

NodeScore discrete_node_score(const ScoredDataset& data, int j, std::span<const int> parents) {
    if (data.kind() != DataKind::DiscreteBinary) throw DataError("discrete BIC requires a binary dataset");
    check_node(data, j, parents);
    const int q = static_cast<int>(parents.size());
    if (q > kMaxDiscreteParents)
        throw DataError("node " + std::to_string(j) + " has " + std::to_string(q) +
                        " parents; discrete BIC refuses more than " + std::to_string(kMaxDiscreteParents));
    const auto& X = data.values();
    const Eigen::Index n = X.rows();

    // counts[2*config + value]
    std::unordered_map<std::uint32_t, std::array<long long, 2>> sparse;
    std::vector<std::array<long long, 2>> dense;
    const bool use_dense = q <= 12;
    if (use_dense) dense.assign(std::size_t{1} << q, {0, 0});
    for (Eigen::Index t = 0; t < n; ++t) {
        std::uint32_t cfg = 0;
        for (int b = 0; b < q; ++b)
            if (X(t, parents[b]) != 0.0) cfg |= (1u << b);
        const int v = X(t, j) != 0.0 ? 1 : 0;
        if (use_dense)
            ++dense[cfg][v];
        else
            ++sparse[cfg][v];
    }
    NodeScore ns;
    auto add = [&ns](const std::array<long long, 2>& c) {
        const double tot = static_cast<double>(c[0] + c[1]);
        for (long long cnt : c)
            if (cnt > 0) ns.loglik += static_cast<double>(cnt) * std::log(static_cast<double>(cnt) / tot);
    };
    if (use_dense)
        for (const auto& c : dense) add(c);
    else
        for (const auto& [cfg, c] : sparse) add(c);
    ns.k = 1LL << q;
    return ns;
}

NodeScore node_score(const ScoredDataset& data, int j, std::span<const int> parents) {
    return data.kind() == DataKind::CopulaGaussian ? gaussian_node_score(data, j, parents)
                                                   : discrete_node_score(data, j, parents);
}

ScoreValue gaussian_bic(const ScoredDataset& data, const Dag& g) {
    return assemble(data, g, [&](int j, std::span<const int> pa) { return gaussian_node_score(data, j, pa); });
}

ScoreValue discrete_bic(const ScoredDataset& data, const Dag& g) {
    return assemble(data, g, [&](int j, std::span<const int> pa) { return discrete_node_score(data, j, pa); });
}

ScoreValue score(const ScoredDataset& data, const Dag& g) {
    return data.kind() == DataKind::CopulaGaussian ? gaussian_bic(data, g) : discrete_bic(data, g);
}

double delta_score(const ScoredDataset& data, const Dag& g, const EdgeEdit& e) {
    const double log_n = std::log(static_cast<double>(data.n()));
    double d = 0.0;
    for (const auto& ch : changed_nodes(g, e))
        d += node_score(data, ch.node, ch.after).local(log_n) - node_score(data, ch.node, ch.before).local(log_n);
    return d;
}

std::vector<double> ols_coefficients(const ScoredDataset& data, int j, std::span<const int> parents) {
    if (data.kind() != DataKind::CopulaGaussian) throw DataError("OLS coefficients need a continuous dataset");
    check_node(data, j, parents);
    const Eigen::Index q = static_cast<Eigen::Index>(parents.size());
    if (q == 0) return {};
    const double n = data.n();
    const auto& G = data.gram();
    Eigen::MatrixXd C(q, q);
    Eigen::VectorXd c(q);
    for (Eigen::Index a = 0; a < q; ++a) {
        c(a) = G(parents[a], j) / n;
        for (Eigen::Index b = 0; b < q; ++b) C(a, b) = G(parents[a], parents[b]) / n;
    }
    Eigen::VectorXd beta = pinv_solve(C, c);
    return {beta.data(), beta.data() + beta.size()};
}

// ---------------------------------------------------------------------------

Scorer::Scorer(std::shared_ptr<const ScoredDataset> data)
    : data_(std::move(data)), log_n_(std::log(static_cast<double>(data_->n()))) {}

std::size_t Scorer::KeyHash::operator()(const Key& k) const {
    std::uint64_t h = 1469598103934665603ULL;
    for (auto w : k.words) {
        h ^= w;
        h *= 1099511628211ULL;
        h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
}

Scorer::Key Scorer::make_key(int j, std::span<const int> parents) const {
    Key key;
    key.words.assign(1 + (static_cast<std::size_t>(data_->p()) + 63) / 64, 0);
    key.words[0] = static_cast<std::uint64_t>(j);
    for (int q : parents) key.words[1 + q / 64] |= std::uint64_t{1} << (q % 64);
    return key;
}

NodeScore Scorer::node(int j, std::span<const int> parents) const {
    std::vector<int> sorted(parents.begin(), parents.end());
    std::sort(sorted.begin(), sorted.end());
    auto key = make_key(j, sorted);
    {
        std::lock_guard lock(mutex_);
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    NodeScore ns = node_score(*data_, j, sorted);
    std::lock_guard lock(mutex_);
    cache_.emplace(std::move(key), ns);
    return ns;
}

ScoreValue Scorer::score(const Dag& g) const {
    return assemble(*data_, g, [this](int j, std::span<const int> pa) { return node(j, pa); });
}

double Scorer::delta(const Dag& g, const EdgeEdit& e) const {
    double d = 0.0;
    for (const auto& ch : changed_nodes(g, e)) d += node(ch.node, ch.after).local(log_n_) - node(ch.node, ch.before).local(log_n_);
    return d;
}

std::size_t Scorer::cache_size() const {
    std::lock_guard lock(mutex_);
    return cache_.size();
}

}  // namespace ddqncd
