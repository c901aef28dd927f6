#include "ddqncd/opponent.hpp"

#include <cmath>
#include <fstream>

#include "ddqncd/errors.hpp"
#include "ddqncd/graph_io.hpp"

namespace ddqncd {

void OpponentSpec::validate() const {
    if (max_iters < 0) throw ConfigError("opponent.max_iters must be non-negative");
    if (kind == OpponentKind::ExternalFile) {
        if (path.empty()) throw ConfigError("external opponent needs a file path");
        if (!(threshold > 0.0 && threshold <= 1.0)) throw ConfigError("opponent.threshold must lie in (0, 1]");
    }
}

GreedyResult greedy_search(const Scorer& scorer, int budget, int max_iters) {
    const int p = scorer.data().p();
    GreedyResult r{Dag(p), 0, false, {}};
    r.score_trace.push_back(scorer.score(r.graph).total);
    while (r.iterations < max_iters) {
        const auto mask = valid_action_mask(r.graph, budget);
        int best = -1;
        double best_delta = kMinImprovement;
        for (int idx = 0; idx < static_cast<int>(mask.size()); ++idx) {
            if (!mask[idx]) continue;
            const double d = scorer.delta(r.graph, decode(idx, p));
            if (d > best_delta) {
                best_delta = d;
                best = idx;
            }
        }
        if (best < 0) {
            r.converged = true;
            return r;
        }
        r.graph = std::get<Dag>(apply_edit(r.graph, decode(best, p), budget));
        ++r.iterations;
        r.score_trace.push_back(scorer.score(r.graph).total);
    }
    // Out of iterations; still report convergence if we happen to sit at a local optimum.
    const auto mask = valid_action_mask(r.graph, budget);
    r.converged = true;
    for (int idx = 0; idx < static_cast<int>(mask.size()) && r.converged; ++idx)
        if (mask[idx] && scorer.delta(r.graph, decode(idx, p)) > kMinImprovement) r.converged = false;
    return r;
}

namespace {

// Row-major reachability on an arbitrary digraph (reach[a][a] only when a lies on a cycle).
std::vector<std::vector<bool>> digraph_reach(const std::vector<std::vector<bool>>& adj) {
    const int p = static_cast<int>(adj.size());
    std::vector<std::vector<bool>> reach(p, std::vector<bool>(p, false));
    for (int s = 0; s < p; ++s) {
        std::vector<int> stack{s};
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int v = 0; v < p; ++v)
                if (adj[u][v] && !reach[s][v]) {
                    reach[s][v] = true;
                    stack.push_back(v);
                }
        }
    }
    return reach;
}

}  // namespace

Dag binarize(const std::vector<std::vector<double>>& weights, double threshold) {
    if (!(threshold > 0.0)) throw ConfigError("binarize threshold must be positive");
    const int p = static_cast<int>(weights.size());
    std::vector<std::vector<bool>> adj(p, std::vector<bool>(p, false));
    for (int i = 0; i < p; ++i) {
        if (static_cast<int>(weights[i].size()) != p) throw DataError("weight matrix is not square");
        for (int j = 0; j < p; ++j) adj[i][j] = i != j && std::abs(weights[i][j]) >= threshold;
    }
    for (;;) {
        const auto reach = digraph_reach(adj);
        int drop_i = -1, drop_j = -1;
        double weakest = 0.0;
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j) {
                // i -> j lies on a cycle iff j reaches i.
                if (!adj[i][j] || !reach[j][i]) continue;
                const double w = std::abs(weights[i][j]);
                if (drop_i < 0 || w < weakest) {
                    weakest = w;
                    drop_i = i;
                    drop_j = j;
                }
            }
        if (drop_i < 0) break;
        adj[drop_i][drop_j] = false;
    }
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
            if (adj[i][j]) edges.emplace_back(i, j);
    return Dag::from_edges(p, edges);
}

Dag load_external_opponent(const std::string& path, int p, double threshold) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open opponent file '" + path + "'");
    std::vector<std::vector<double>> w;
    try {
        w = read_real_matrix_csv(in);
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
    const int cols = w.empty() ? 0 : static_cast<int>(w.front().size());
    if (static_cast<int>(w.size()) != p || cols != p)
        throw DataError(path + ": opponent matrix is " + std::to_string(w.size()) + "x" + std::to_string(cols) +
                        " but the dataset has p=" + std::to_string(p));
    bool binary = true;
    for (const auto& row : w)
        for (double v : row)
            if (v != 0.0 && v != 1.0) binary = false;
    return binarize(w, binary ? 1.0 : threshold);
}

Dag make_warm_start(const OpponentSpec& spec, const Scorer& scorer, int budget) {
    spec.validate();
    if (spec.kind == OpponentKind::GreedySearch) return greedy_search(scorer, budget, spec.max_iters).graph;
    return load_external_opponent(spec.path, scorer.data().p(), spec.threshold);
}

}  // namespace ddqncd
