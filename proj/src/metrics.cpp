#include "ddqncd/metrics.hpp"

#include "ddqncd/errors.hpp"

namespace ddqncd {

double composite_score(double tpr, double fdr, int shd) {
    constexpr double w = 1.0 / 3.0;
    return w * tpr + w * (1.0 - fdr) + w * (1.0 / (1.0 + shd));
}

int structural_hamming_distance(const Dag& a, const Dag& b) {
    if (a.p() != b.p()) throw DataError("SHD: graphs have different node counts");
    int shd = 0;
    for (int i = 0; i < a.p(); ++i)
        for (int j = i + 1; j < a.p(); ++j)
            if (a.has_edge(i, j) != b.has_edge(i, j) || a.has_edge(j, i) != b.has_edge(j, i)) ++shd;
    return shd;
}

StructureMetrics structure_metrics(const Dag& est, const Dag& truth) {
    if (est.p() != truth.p())
        throw DataError("estimate has " + std::to_string(est.p()) + " nodes but truth has " +
                        std::to_string(truth.p()));
    int tp = 0;
    for (auto [i, j] : est.edges())
        if (truth.has_edge(i, j)) ++tp;
    const int fp = est.edge_count() - tp;

    StructureMetrics m;
    if (truth.edge_count() == 0) {
        m.tpr = 1.0;
        m.empty_truth = true;
    } else {
        m.tpr = static_cast<double>(tp) / truth.edge_count();
    }
    m.fdr = est.edge_count() == 0 ? 0.0 : static_cast<double>(fp) / est.edge_count();
    m.shd = structural_hamming_distance(est, truth);
    m.score = composite_score(m.tpr, m.fdr, m.shd);
    return m;
}

}  // namespace ddqncd
