#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ddqncd/agent.hpp"
#include "ddqncd/dag.hpp"
#include "ddqncd/dataset.hpp"
#include "ddqncd/opponent.hpp"
#include "ddqncd/sem.hpp"

namespace ddqncd {

// ---- candidate sets -------------------------------------------------------

struct Candidate {
    std::string label;
    Dag graph;
};

// Ordered list of graphs, at most one per Markov equivalence class (members of
// one class tie under BIC, so no score can tell them apart). Entry 0 is
// always the opponent.
class CandidateSet {
public:
    explicit CandidateSet(Dag opponent);

    // Appends unless an equivalent graph is already present.
    bool add(std::string label, Dag g);
    const std::vector<Candidate>& items() const { return items_; }
    std::size_t size() const { return items_.size(); }
    const Candidate& operator[](std::size_t i) const { return items_.at(i); }
    // Order-sensitive hash over labels and adjacencies.
    std::uint64_t fingerprint() const;

private:
    std::vector<Candidate> items_;
};

struct CandidateConfig {
    OpponentSpec opponent;
    AgentConfig agent;
    double prune_threshold = 0.05;
};

// Opponent from `train`, agent champion snapshots warm-started from it, then
// coefficient-pruned variants of every graph so far.
CandidateSet build_candidate_set(const Scorer& train, const CandidateConfig& cfg);

// ---- selection study ------------------------------------------------------

// Lambda_n(A) = mu(A) - k(A) log(n) / (2n), with mu the mean per-sample
// log-likelihood of A fitted on the pool.
double population_score(const ScoredDataset& pool, const Dag& g, int n);

// Index of the largest value; exact ties go to `preferred`, then to the smallest index.
std::size_t select_empirical(std::span<const double> scores, std::size_t preferred = 0);

struct TopTwo {
    std::size_t best = 0;
    std::size_t second = 0;
    double gap = 0.0;  // values[best] - values[second] >= 0
};
// Throws UndefinedQuantity when fewer than two values are given.
TopTwo top_two(std::span<const double> values);

struct SelectionTrialResult {
    int n = 0;
    int trial = 0;
    std::string selected;
    std::string best;
    double empirical_gap = 0.0;  // (S_n(first) - S_n(second)) / n
    bool misselected = false;
};

struct SelectionPoint {
    int n = 0;
    int trials = 0;
    int misselections = 0;
    double misselection_rate = 0.0;
    double gap = 0.0;  // Delta_n, per sample
    std::string best;
};

// One sample size from precomputed numbers: trial_scores[t][c] = S_n of
// candidate c in trial t, population[c] = Lambda_n. Candidate 0 wins exact ties.
SelectionPoint tabulate_selection(int n, const std::vector<std::vector<double>>& trial_scores,
                                  std::span<const double> population, const std::vector<std::string>& labels,
                                  std::vector<SelectionTrialResult>* rows = nullptr);

struct SelectionConfig {
    SemSpec sem{.p = 15};
    std::vector<int> sample_sizes{200, 400, 800, 1600};
    int trials = 20;
    double train_fraction = 0.5;
    int pool_rows = 10000;
    CandidateConfig candidates;
    std::uint64_t seed = 0;
    int threads = 1;

    // p = 30, 40 trials, n in {400, 600, 800, 1000}.
    static SelectionConfig paper_scale();
    void validate() const;
};

struct SelectionOutcome {
    WeightedDag truth;
    CandidateSet candidates{Dag{}};
    std::vector<double> candidate_train_scores;
    std::vector<SelectionTrialResult> trials;
    std::vector<SelectionPoint> curve;
    bool candidates_unchanged = true;
    double wall_seconds = 0.0;
};

// Fixed candidates: fresh SEM samples per (n, trial), copula BIC argmax versus
// the pool's Lambda_n argmax. Throws UndefinedQuantity when |C| < 2.
SelectionOutcome run_selection(const WeightedDag& truth, const CandidateSet& candidates, const ScoredDataset& pool,
                               const std::vector<int>& sample_sizes, int trials, std::uint64_t seed, int threads);

// Full protocol: draw the SEM, split train/pool, build candidates, run.
SelectionOutcome selection_experiment(const SelectionConfig& cfg);

struct SelectionVerdict {
    bool rate_ok = false;  // nonincreasing up to one inversion of at most 1/trials
    bool gap_ok = false;   // nondecreasing
    int inversions = 0;
    bool passed() const { return rate_ok && gap_ok; }
};
SelectionVerdict judge_selection(const std::vector<SelectionPoint>& curve);

// ceil(8 L^2 / gap^2 * ln(2 |C| / fail_prob)). gap = 0 raises UndefinedQuantity.
long long sample_bound(double lipschitz, double gap, long long num_candidates, double fail_prob);
// The same expression without the ceiling.
double sample_bound_real(double lipschitz, double gap, long long num_candidates, double fail_prob);

// ---- hitting time ---------------------------------------------------------

// Every DAG on p <= 5 nodes with at most `budget` edges, by increasing code.
std::vector<Dag> enumerate_dags(int p, int budget);
// Row-major bit code of the off-diagonal adjacency; used for deterministic tie-breaks.
std::uint64_t graph_code(const Dag& g);

struct HittingConfig {
    int p = 3;
    double chain_weight = 0.8;  // truth is the chain 0 -> 1 -> ... -> p-1
    int n = 2000;
    std::vector<int> distances{0, 1, 2};
    int repeats = 200;
    int episodes_cap = 100000;
    double eps = 1.0;  // enters the bound only; play is uniform
    std::optional<int> budget;   // default 4p
    std::optional<int> horizon;  // default 2p
    std::uint64_t seed = 0;
    void validate() const;
};

struct HittingRow {
    int d = 0;
    Dag warm;
    double mean_episodes = 0.0;
    double std_error = 0.0;
    double bound = 0.0;  // (A_max / eps)^d
    int repeats = 0;
    int censored = 0;
    bool within_bound = false;
};

struct HittingOutcome {
    Dag target;  // G*
    double target_score = 0.0;
    int a_max = 0;
    std::vector<HittingRow> rows;
    bool bound_ok = false;
    bool monotone_ok = false;  // no significant decrease at one-sided 95%
    bool passed() const { return bound_ok && monotone_ok; }
};

// Shortest strictly improving edit path length from each DAG to `target`
// (nullopt when unreachable). Improvement means delta > kMinImprovement.
std::vector<std::optional<int>> improving_distances(const Scorer& scorer, const std::vector<Dag>& dags,
                                                    const Dag& target, int budget);

// Episodes of uniform legal moves (the eps = 1 agent) until the first visit of
// `target`; the start state counts as visited. nullopt when censored.
std::optional<int> episodes_to_hit(const Dag& warm, const Dag& target, int budget, int horizon, int episodes_cap,
                                   Rng& rng);

HittingOutcome hitting_time_experiment(const HittingConfig& cfg);

// ---- safety ---------------------------------------------------------------

struct SafetyViolation {
    std::size_t index = 0;
    double output_score = 0.0;
    double warm_score = 0.0;
};

struct SafetyVerdict {
    std::size_t runs = 0;
    std::vector<SafetyViolation> violations;
    bool passed() const { return violations.empty(); }
};

SafetyVerdict safety_audit(std::span<const RunReport> reports);

struct SafetyConfig {
    SemSpec sem{.p = 10};
    int n = 1000;
    int runs = 50;
    OpponentSpec opponent;
    AgentConfig agent;
    std::uint64_t seed = 0;
    int threads = 1;
    SafetyConfig() { agent.episodes = 100; }
};

struct SafetyOutcome {
    std::vector<RunReport> reports;
    SafetyVerdict verdict;
    double wall_seconds = 0.0;
};

// Independent SEM draws; greedy (or file) opponent as warm start; one agent run each.
SafetyOutcome safety_experiment(const SafetyConfig& cfg);

// ---- CSV output -----------------------------------------------------------

void write_selection_trials_csv(const std::string& path, const std::vector<SelectionTrialResult>& rows);
void write_selection_summary_csv(const std::string& path, const std::vector<SelectionPoint>& curve);
void write_hitting_csv(const std::string& path, const HittingOutcome& out);
void write_safety_csv(const std::string& path, const std::vector<RunReport>& reports);

}  // namespace ddqncd
