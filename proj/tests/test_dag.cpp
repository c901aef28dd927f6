#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "ddqncd/dag.hpp"
#include "ddqncd/errors.hpp"
#include "oracles.hpp"

using namespace ddqncd;

namespace {

int count_true(const std::vector<bool>& m) { return static_cast<int>(std::count(m.begin(), m.end(), true)); }

Dag random_graph(int p, std::mt19937_64& rng, double density) {
    std::vector<int> order(p);
    for (int i = 0; i < p; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::bernoulli_distribution coin(density);
    std::vector<std::pair<int, int>> edges;
    for (int a = 0; a < p; ++a)
        for (int b = a + 1; b < p; ++b)
            if (coin(rng)) edges.emplace_back(order[a], order[b]);
    return Dag::from_edges(p, edges);
}

}  // namespace

TEST(IsAcyclic, SmallCases) {
    EXPECT_TRUE(is_acyclic({{0, 0, 0}, {0, 0, 0}, {0, 0, 0}}));
    EXPECT_FALSE(is_acyclic({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}}));
    EXPECT_TRUE(is_acyclic({{0, 1, 1}, {0, 0, 1}, {0, 0, 0}}));
}

TEST(IsAcyclic, RejectsMalformedInput) {
    EXPECT_THROW(is_acyclic({{0, 1}, {0, 0}, {0, 0}}), MalformedGraph);
    EXPECT_THROW(is_acyclic({{1, 0}, {0, 0}}), MalformedGraph);
}

TEST(Dag, FactoriesValidate) {
    EXPECT_THROW(Dag::from_matrix({{0, 1}, {1, 0}}), MalformedGraph);
    EXPECT_THROW(Dag::from_matrix({{0, 2}, {0, 0}}), MalformedGraph);
    EXPECT_THROW(Dag::from_edges(2, {{0, 0}}), MalformedGraph);
    EXPECT_THROW(Dag::from_edges(2, {{0, 2}}), MalformedGraph);
    const Dag g = Dag::from_edges(3, {{0, 1}, {1, 2}});
    EXPECT_EQ(g.edge_count(), 2);
    EXPECT_EQ(g.parents(2), std::vector<int>{1});
    EXPECT_EQ(g.children(0), std::vector<int>{1});
    EXPECT_EQ(Dag::from_matrix(g.to_matrix()), g);
}

TEST(ActionIndex, EncodeDecodeBijection) {
    for (int p = 1; p <= 5; ++p) {
        for (ActionIndex idx = 0; idx < action_count(p); ++idx) {
            EXPECT_EQ(encode(decode(idx, p), p), idx);
        }
    }
    EXPECT_EQ(encode({EditOp::Reverse, 1, 0}, 2), 2 * 4 + 1 * 2 + 0);
}

TEST(ApplyEdit, SpecExamples) {
    const auto r1 = apply_edit(Dag(2), {EditOp::Add, 0, 1}, 4);
    ASSERT_TRUE(std::holds_alternative<Dag>(r1));
    EXPECT_EQ(std::get<Dag>(r1), Dag::from_edges(2, {{0, 1}}));

    const auto r2 = apply_edit(Dag::from_edges(2, {{0, 1}}), {EditOp::Add, 1, 0}, 4);
    ASSERT_TRUE(std::holds_alternative<Rejection>(r2));
    EXPECT_EQ(std::get<Rejection>(r2), Rejection::WouldCycle);

    // {1->0, 1->2, 0->2} is acyclic, so the reversal goes through.
    const Dag tri = Dag::from_edges(3, {{0, 1}, {1, 2}, {0, 2}});
    const auto r3 = apply_edit(tri, {EditOp::Reverse, 0, 1}, 4);
    ASSERT_TRUE(std::holds_alternative<Dag>(r3));
    const Dag rev = std::get<Dag>(r3);
    EXPECT_TRUE(oracle::acyclic(rev.to_matrix()));
    EXPECT_EQ(rev, Dag::from_edges(3, {{1, 0}, {1, 2}, {0, 2}}));
}

TEST(ApplyEdit, RejectionKinds) {
    const Dag g = Dag::from_edges(3, {{0, 1}, {1, 2}});
    EXPECT_EQ(check_edit(g, {EditOp::Add, 0, 1}, 9), Rejection::EdgeExists);
    EXPECT_EQ(check_edit(g, {EditOp::Remove, 0, 2}, 9), Rejection::EdgeAbsent);
    EXPECT_EQ(check_edit(g, {EditOp::Reverse, 0, 2}, 9), Rejection::EdgeAbsent);
    EXPECT_EQ(check_edit(g, {EditOp::Add, 2, 0}, 9), Rejection::WouldCycle);
    EXPECT_EQ(check_edit(g, {EditOp::Add, 0, 2}, 2), Rejection::BudgetExceeded);
    EXPECT_EQ(check_edit(g, {EditOp::Add, 1, 1}, 9), Rejection::SelfLoop);
    EXPECT_EQ(check_edit(Dag::from_edges(3, {{0, 1}, {1, 2}, {0, 2}}), {EditOp::Reverse, 0, 2}, 9),
              Rejection::WouldCycle);
    // Input untouched on rejection.
    EXPECT_EQ(g, Dag::from_edges(3, {{0, 1}, {1, 2}}));
}

TEST(Mask, SpecExamples) {
    auto m = valid_action_mask(Dag(2), 4);
    EXPECT_EQ(count_true(m), 2);
    EXPECT_TRUE(m[encode({EditOp::Add, 0, 1}, 2)]);
    EXPECT_TRUE(m[encode({EditOp::Add, 1, 0}, 2)]);
    EXPECT_EQ(count_true(valid_action_mask(Dag(2), 0)), 0);

    m = valid_action_mask(Dag::from_edges(2, {{0, 1}}), 1);
    EXPECT_EQ(count_true(m), 2);
    EXPECT_TRUE(m[encode({EditOp::Remove, 0, 1}, 2)]);
    EXPECT_TRUE(m[encode({EditOp::Reverse, 0, 1}, 2)]);
}

// Every DAG on up to 4 nodes, every index, two budgets: mask agrees with apply_edit.
TEST(Mask, ExhaustiveAgreementWithApplyEdit) {
    for (int p = 1; p <= 4; ++p) {
        for (const auto& adj : oracle::all_dags(p)) {
            const Dag g = Dag::from_matrix(adj);
            for (int budget : {g.edge_count(), 4 * p}) {
                const auto mask = valid_action_mask(g, budget);
                ASSERT_EQ(static_cast<int>(mask.size()), action_count(p));
                for (ActionIndex idx = 0; idx < action_count(p); ++idx) {
                    const EdgeEdit e = decode(idx, p);
                    const auto res = apply_edit(g, e, budget);
                    ASSERT_EQ(mask[idx], std::holds_alternative<Dag>(res)) << "p=" << p << " idx=" << idx;
                    if (e.i == e.j) ASSERT_FALSE(mask[idx]);
                    if (mask[idx]) {
                        const Dag& next = std::get<Dag>(res);
                        ASSERT_TRUE(oracle::acyclic(next.to_matrix()));
                        ASSERT_LE(next.edge_count(), std::max(budget, g.edge_count()));
                    }
                }
            }
        }
    }
}

TEST(Edits, AddRemoveAndDoubleReverseRoundTrip) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const int p = 2 + trial % 5;
        const Dag g = random_graph(p, rng, 0.4);
        for (ActionIndex idx = 0; idx < action_count(p); ++idx) {
            const EdgeEdit e = decode(idx, p);
            auto once = apply_edit(g, e, 100);
            if (!std::holds_alternative<Dag>(once)) continue;
            const Dag& h = std::get<Dag>(once);
            if (e.op == EditOp::Add) {
                EXPECT_EQ(std::get<Dag>(apply_edit(h, {EditOp::Remove, e.i, e.j}, 100)), g);
            } else if (e.op == EditOp::Reverse) {
                auto back = apply_edit(h, {EditOp::Reverse, e.j, e.i}, 100);
                ASSERT_TRUE(std::holds_alternative<Dag>(back));
                EXPECT_EQ(std::get<Dag>(back), g);
            }
        }
    }
}

TEST(Reachability, ReflexiveTransitive) {
    const Dag g = Dag::from_edges(4, {{0, 1}, {1, 2}});
    const auto r = reachability(g);
    EXPECT_TRUE(r[0 * 4 + 0]);
    EXPECT_TRUE(r[0 * 4 + 2]);
    EXPECT_FALSE(r[2 * 4 + 0]);
    EXPECT_FALSE(r[0 * 4 + 3]);
}

TEST(TopologicalOrder, RespectsEdges) {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 50; ++t) {
        const Dag g = random_graph(8, rng, 0.5);
        const auto order = topological_order(g);
        std::vector<int> pos(8);
        for (int k = 0; k < 8; ++k) pos[order[k]] = k;
        for (auto [i, j] : g.edges()) EXPECT_LT(pos[i], pos[j]);
    }
    EXPECT_EQ(topological_order(Dag(3)), (std::vector<int>{0, 1, 2}));
}

TEST(MarkovEquivalence, ChainsForksAndColliders) {
    const Dag chain = Dag::from_edges(3, {{0, 1}, {1, 2}});
    const Dag back = Dag::from_edges(3, {{2, 1}, {1, 0}});
    const Dag fork = Dag::from_edges(3, {{1, 0}, {1, 2}});
    const Dag collider = Dag::from_edges(3, {{0, 1}, {2, 1}});
    EXPECT_TRUE(markov_equivalent(chain, back));
    EXPECT_TRUE(markov_equivalent(chain, fork));
    EXPECT_FALSE(markov_equivalent(chain, collider));
    EXPECT_FALSE(markov_equivalent(chain, Dag::from_edges(3, {{0, 1}})));
}

TEST(Hash, StableAndDiscriminating) {
    const Dag a = Dag::from_edges(3, {{0, 1}});
    EXPECT_EQ(a.hash(), Dag::from_edges(3, {{0, 1}}).hash());
    EXPECT_NE(a.hash(), Dag::from_edges(3, {{1, 0}}).hash());
}
