#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "ddqncd/errors.hpp"
#include "ddqncd/theorem_lab.hpp"
#include "oracles.hpp"

using namespace ddqncd;

namespace {

WeightedDag chain(int p, double w) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i + 1 < p; ++i) e.emplace_back(i, i + 1);
    WeightedDag out{Dag::from_edges(p, e), Eigen::MatrixXd::Zero(p, p)};
    for (auto [i, j] : e) out.weights(i, j) = w;
    return out;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST(CandidateSet, DedupesMarkovEquivalentGraphs) {
    CandidateSet c(Dag::from_edges(3, {{0, 1}, {1, 2}}));
    EXPECT_FALSE(c.add("reversed", Dag::from_edges(3, {{1, 0}, {2, 1}})));
    EXPECT_FALSE(c.add("fork", Dag::from_edges(3, {{1, 0}, {1, 2}})));
    EXPECT_TRUE(c.add("collider", Dag::from_edges(3, {{0, 1}, {2, 1}})));
    EXPECT_TRUE(c.add("empty", Dag(3)));
    EXPECT_EQ(c.size(), 3u);
    EXPECT_EQ(c[0].label, "opponent");
    EXPECT_EQ(c[2].label, "empty");
    CandidateSet d(Dag::from_edges(3, {{0, 1}, {1, 2}}));
    d.add("collider", Dag::from_edges(3, {{0, 1}, {2, 1}}));
    EXPECT_NE(c.fingerprint(), d.fingerprint());
    d.add("empty", Dag(3));
    EXPECT_EQ(c.fingerprint(), d.fingerprint());
}

TEST(CandidateSet, BuildStartsWithOpponentAndStaysDistinct) {
    const auto data = std::make_shared<const ScoredDataset>(ScoredDataset::copula(simulate_sem(chain(5, 0.7), 600, 1)));
    const Scorer s(data);
    CandidateConfig cfg;
    cfg.agent.episodes = 20;
    cfg.agent.hidden_widths = {16};
    cfg.agent.warmup_transitions = 20;
    cfg.agent.batch = 8;
    const auto set = build_candidate_set(s, cfg);
    ASSERT_GE(set.size(), 1u);
    EXPECT_EQ(set[0].label, "opponent");
    EXPECT_EQ(set[0].graph, greedy_search(s, 20, cfg.opponent.max_iters).graph);
    for (std::size_t a = 0; a < set.size(); ++a)
        for (std::size_t b = a + 1; b < set.size(); ++b) EXPECT_FALSE(markov_equivalent(set[a].graph, set[b].graph));
}

TEST(PopulationScore, MatchesOracleAndPenaltyShape) {
    const auto raw = simulate_sem(chain(3, 0.8), 5000, 2);
    const auto pool = ScoredDataset::copula(raw);
    const Dag g = Dag::from_edges(3, {{0, 1}, {1, 2}});
    const auto bic = oracle::gaussian_bic(pool.values(), g.to_matrix());
    const double mu = bic.loglik / 5000.0;
    EXPECT_NEAR(population_score(pool, g, 400), mu - 5.0 * std::log(400.0) / 800.0, 1e-10);
    // Increasing in n for a fixed graph.
    EXPECT_LT(population_score(pool, g, 400), population_score(pool, g, 1600));
}

TEST(PopulationScore, RanksTrueChainAboveEmpty) {
    const auto pool = ScoredDataset::copula(simulate_sem(chain(3, 0.8), 100000, 3));
    EXPECT_GT(population_score(pool, chain(3, 0.8).dag, 1000), population_score(pool, Dag(3), 1000));
}

TEST(Selection, ArgmaxAndTopTwo) {
    const std::vector<double> v{1.0, 3.0, 3.0, 2.0};
    EXPECT_EQ(select_empirical(v), 1u);
    const std::vector<double> tie{5.0, 5.0, 1.0};
    EXPECT_EQ(select_empirical(tie), 0u);
    EXPECT_EQ(select_empirical(std::vector<double>{1.0, 5.0, 5.0}, 2), 2u);
    const auto t = top_two(std::vector<double>{0.5, 2.0, 1.5});
    EXPECT_EQ(t.best, 1u);
    EXPECT_EQ(t.second, 2u);
    EXPECT_DOUBLE_EQ(t.gap, 0.5);
    EXPECT_THROW(top_two(std::vector<double>{1.0}), UndefinedQuantity);
}

TEST(Selection, TabulateCountsMisselections) {
    const std::vector<std::vector<double>> scores{{1.0, 2.0}, {3.0, 2.0}, {2.0, 2.0}};
    const std::vector<double> pop{0.0, 0.25};
    std::vector<SelectionTrialResult> rows;
    const auto pt = tabulate_selection(100, scores, pop, {"opponent", "b"}, &rows);
    EXPECT_EQ(pt.misselections, 2);
    EXPECT_DOUBLE_EQ(pt.misselection_rate, 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(pt.gap, 0.25);
    EXPECT_EQ(pt.best, "b");
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[2].selected, "opponent");  // exact tie goes to the opponent
    for (const auto& r : rows) EXPECT_EQ(r.misselected, r.selected != r.best);
}

TEST(Selection, WellSeparatedCandidatesDecay) {
    // Truth, truth minus its weakest edge and the empty graph: gaps large
    // enough for the misselection rate to fall visibly over this n range.
    WeightedDag truth = chain(4, 0.8);
    truth.weights(2, 3) = 0.12;
    CandidateSet c(Dag::from_edges(4, {{0, 1}, {1, 2}}));
    c.add("truth", truth.dag);
    c.add("empty", Dag(4));
    const auto pool = ScoredDataset::copula(simulate_sem(truth, 100000, 4));
    const auto out = run_selection(truth, c, pool, {50, 200, 800, 3200}, 40, 5, 1);
    ASSERT_EQ(out.curve.size(), 4u);
    EXPECT_EQ(out.curve.back().best, "truth");
    EXPECT_GT(out.curve.front().misselection_rate, out.curve.back().misselection_rate);
    EXPECT_LE(out.curve.back().misselection_rate, 0.1);
    EXPECT_TRUE(out.candidates_unchanged);
    EXPECT_EQ(out.trials.size(), 160u);
}

TEST(Selection, PoolAsSampleSelectsPopulationBest) {
    const WeightedDag truth = chain(3, 0.5);
    CandidateSet c(Dag(3));
    c.add("truth", truth.dag);
    c.add("collider", Dag::from_edges(3, {{0, 1}, {2, 1}}));
    const auto pool = ScoredDataset::copula(simulate_sem(truth, 4000, 6));
    std::vector<double> pop, emp;
    for (const auto& cand : c.items()) {
        pop.push_back(population_score(pool, cand.graph, pool.n()));
        emp.push_back(score(pool, cand.graph).total);
    }
    EXPECT_EQ(select_empirical(emp), top_two(pop).best);
}

TEST(Selection, NeedsTwoCandidates) {
    CandidateSet c(Dag(3));
    const auto pool = ScoredDataset::copula(simulate_sem(chain(3, 0.5), 100, 7));
    EXPECT_THROW(run_selection(chain(3, 0.5), c, pool, {100}, 2, 1, 1), UndefinedQuantity);
}

TEST(Selection, Verdict) {
    auto pt = [](double rate, double gap) {
        SelectionPoint s;
        s.trials = 20;
        s.misselection_rate = rate;
        s.gap = gap;
        return s;
    };
    EXPECT_TRUE(judge_selection({pt(0.5, 0.1), pt(0.3, 0.1), pt(0.35, 0.2), pt(0.1, 0.3)}).passed());
    EXPECT_FALSE(judge_selection({pt(0.5, 0.1), pt(0.6, 0.1)}).rate_ok);
    EXPECT_FALSE(judge_selection({pt(0.5, 0.1), pt(0.55, 0.1), pt(0.5, 0.1), pt(0.55, 0.1)}).rate_ok);
    EXPECT_FALSE(judge_selection({pt(0.5, 0.2), pt(0.4, 0.1)}).gap_ok);
}

TEST(SampleBound, ReferenceValueAndMonotonicity) {
    EXPECT_EQ(sample_bound(1.0, 0.5, 4, 0.1), 141);
    EXPECT_EQ(static_cast<long long>(std::ceil(oracle::sample_bound(1.0L, 0.5L, 4.0L, 0.1L))), 141);
    EXPECT_NEAR(sample_bound_real(1.0, 0.5, 4, 0.1), 32.0 * std::log(80.0), 1e-12);
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> u(0.05, 2.0), d(0.01, 0.9);
    for (int i = 0; i < 500; ++i) {
        const double L = u(gen), gap = u(gen), delta = d(gen);
        const long long c = 1 + static_cast<long long>(gen() % 50);
        const double base = sample_bound_real(L, gap, c, delta);
        EXPECT_LE(sample_bound_real(L, gap * 1.1, c, delta), base);
        EXPECT_LE(sample_bound_real(L, gap, c, std::min(0.99, delta * 1.1)), base);
        EXPECT_GE(sample_bound_real(L * 1.1, gap, c, delta), base);
        EXPECT_GE(sample_bound_real(L, gap, c + 1, delta), base);
    }
    EXPECT_THROW(sample_bound(1.0, 0.0, 4, 0.1), UndefinedQuantity);
    EXPECT_THROW(sample_bound(1.0, -0.1, 4, 0.1), ConfigError);
    EXPECT_THROW(sample_bound(1.0, 0.5, 0, 0.1), ConfigError);
    EXPECT_THROW(sample_bound(1.0, 0.5, 4, 1.0), ConfigError);
    EXPECT_THROW(sample_bound(0.0, 0.5, 4, 0.1), ConfigError);
}

TEST(Hitting, EnumerationMatchesOracle) {
    for (int p = 1; p <= 4; ++p) {
        const auto mine = enumerate_dags(p, p * p);
        const auto ref = oracle::all_dags(p);
        ASSERT_EQ(mine.size(), ref.size());
        std::set<std::vector<std::vector<int>>> a, b(ref.begin(), ref.end());
        for (const auto& g : mine) a.insert(g.to_matrix());
        EXPECT_EQ(a, b);
        for (std::size_t i = 1; i < mine.size(); ++i) EXPECT_LT(graph_code(mine[i - 1]), graph_code(mine[i]));
    }
    EXPECT_EQ(enumerate_dags(3, 1).size(), 7u);
    EXPECT_EQ(enumerate_dags(5, 20).size(), 29281u);
    EXPECT_THROW(enumerate_dags(6, 1), ConfigError);
}

TEST(Hitting, DistancesAreConsistent) {
    const auto data = std::make_shared<const ScoredDataset>(ScoredDataset::copula(simulate_sem(chain(3, 0.8), 2000, 9)));
    const Scorer s(data);
    const auto dags = enumerate_dags(3, 12);
    std::size_t best = 0;
    for (std::size_t i = 1; i < dags.size(); ++i)
        if (s.score(dags[i]).total > s.score(dags[best]).total + 1e-8) best = i;
    const auto dist = improving_distances(s, dags, dags[best], 12);
    EXPECT_EQ(dist[best], 0);
    for (std::size_t i = 0; i < dags.size(); ++i) {
        if (!dist[i] || *dist[i] == 0) continue;
        // Some strictly improving legal edit leads one step closer.
        bool found = false;
        const auto mask = valid_action_mask(dags[i], 12);
        for (std::size_t a = 0; a < mask.size() && !found; ++a) {
            if (!mask[a]) continue;
            const auto e = decode(static_cast<int>(a), 3);
            if (s.delta(dags[i], e) <= kMinImprovement) continue;
            const Dag nxt = std::get<Dag>(apply_edit(dags[i], e, 12));
            for (std::size_t k = 0; k < dags.size(); ++k)
                if (dags[k] == nxt && dist[k] && *dist[k] == *dist[i] - 1) found = true;
        }
        EXPECT_TRUE(found);
    }
}

TEST(Hitting, StartAtTargetTakesOneEpisode) {
    Rng rng(1);
    const Dag g = Dag::from_edges(3, {{0, 1}});
    EXPECT_EQ(episodes_to_hit(g, g, 12, 6, 10, rng), 1);
    EXPECT_FALSE(episodes_to_hit(Dag(3), Dag::from_edges(3, {{0, 1}, {1, 2}}), 12, 1, 5, rng));
}

TEST(Hitting, SmallExperimentWithinBound) {
    HittingConfig cfg;
    cfg.repeats = 60;
    const auto out = hitting_time_experiment(cfg);
    ASSERT_EQ(out.rows.size(), 3u);
    EXPECT_EQ(out.rows[0].mean_episodes, 1.0);
    for (const auto& r : out.rows) {
        EXPECT_LE(r.mean_episodes, r.bound);
        EXPECT_EQ(r.censored, 0);
        EXPECT_DOUBLE_EQ(r.bound, std::pow(out.a_max, r.d));
    }
    EXPECT_TRUE(out.passed());
}

TEST(Safety, AuditFlagsViolations) {
    std::vector<RunReport> reps(3);
    for (auto& r : reps) r.warm_score.total = -10.0, r.output_score.total = -10.0;
    reps[1].output_score.total = -9.0;
    EXPECT_TRUE(safety_audit(reps).passed());
    reps[2].output_score.total = -10.5;
    const auto v = safety_audit(reps);
    ASSERT_EQ(v.violations.size(), 1u);
    EXPECT_EQ(v.violations[0].index, 2u);
    EXPECT_EQ(v.runs, 3u);
}

TEST(Safety, SmallExperimentPasses) {
    SafetyConfig cfg;
    cfg.sem.p = 5;
    cfg.n = 300;
    cfg.runs = 4;
    cfg.agent.episodes = 10;
    cfg.agent.hidden_widths = {16};
    cfg.agent.warmup_transitions = 20;
    const auto out = safety_experiment(cfg);
    EXPECT_EQ(out.reports.size(), 4u);
    EXPECT_TRUE(out.verdict.passed());
}

TEST(Csv, WritersProduceHeaders) {
    const auto dir = std::filesystem::temp_directory_path() / "ddqncd_lab";
    std::filesystem::create_directories(dir);
    SelectionTrialResult row{200, 0, "opponent", "b", 0.01, true};
    write_selection_trials_csv((dir / "t.csv").string(), {row});
    EXPECT_EQ(slurp(dir / "t.csv").substr(0, 34), "n,trial,selected,best,misselected,");
    SelectionPoint pt;
    pt.n = 200;
    write_selection_summary_csv((dir / "s.csv").string(), {pt});
    EXPECT_EQ(slurp(dir / "s.csv").substr(0, 10), "n,rate,gap");
    EXPECT_THROW(write_selection_summary_csv("/nonexistent/dir/x.csv", {pt}), IoError);
}
