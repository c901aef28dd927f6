#pragma once

#include "ddqncd/dag.hpp"

namespace ddqncd {

struct StructureMetrics {
    double tpr = 0.0;
    double fdr = 0.0;
    int shd = 0;
    double score = 0.0;
    // Set when the truth has no edges and TPR was defined as 1 by convention.
    bool empty_truth = false;
};

// Composite score with equal weights: (TPR + (1 - FDR) + 1/(1 + SHD)) / 3.
double composite_score(double tpr, double fdr, int shd);

// SHD counts each unordered node pair whose edge state differs once, so a
// reversed edge costs 1. FDR of an empty estimate is 0.
StructureMetrics structure_metrics(const Dag& est, const Dag& truth);

int structural_hamming_distance(const Dag& a, const Dag& b);

}  // namespace ddqncd
