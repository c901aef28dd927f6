#pragma once

#include <string>
#include <vector>

#include "ddqncd/dag.hpp"
#include "ddqncd/score.hpp"

namespace ddqncd {

enum class OpponentKind { GreedySearch, ExternalFile };

struct OpponentSpec {
    OpponentKind kind = OpponentKind::GreedySearch;
    std::string path;        // ExternalFile only
    double threshold = 0.3;  // ExternalFile with weighted entries
    int max_iters = 10000;

    void validate() const;
};

// Improvements at or below this are treated as ties; keeps floating-point
// noise between score-equivalent graphs from driving the ascent.
inline constexpr double kMinImprovement = 1e-8;

struct GreedyResult {
    Dag graph;
    int iterations = 0;
    // True when the ascent stopped because no edit improved the score
    // (the result is then 1-optimal), false when max_iters ran out.
    bool converged = false;
    std::vector<double> score_trace;
};

// Hill-climb from the empty graph: apply the legal edit with the largest
// delta while it exceeds kMinImprovement; ties go to the smallest action index.
GreedyResult greedy_search(const Scorer& scorer, int budget, int max_iters);

// Keep |w| >= threshold off the diagonal, then delete the weakest edge lying on
// a cycle (ties: smallest row-major index) until the graph is acyclic.
Dag binarize(const std::vector<std::vector<double>>& weights, double threshold);

// Weighted or 0/1 p x p CSV; 0/1 files are taken as-is (threshold ignored).
// Throws DataError when the file is not p x p.
Dag load_external_opponent(const std::string& path, int p, double threshold);

Dag make_warm_start(const OpponentSpec& spec, const Scorer& scorer, int budget);

}  // namespace ddqncd
