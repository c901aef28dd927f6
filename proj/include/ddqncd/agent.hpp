#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ddqncd/dag.hpp"
#include "ddqncd/qnetwork.hpp"
#include "ddqncd/replay.hpp"
#include "ddqncd/rng.hpp"
#include "ddqncd/score.hpp"

namespace ddqncd {

struct AgentConfig {
    double gamma = 0.98;
    double tau = 0.005;
    double lambda_sparsity = 1e-3;
    double step_cost = 1e-4;
    double invalid_penalty = 0.1;
    std::optional<int> budget;   // default 4p
    std::optional<int> horizon;  // default 2p
    int episodes = 500;
    int champion_period = 5;
    double eps_start = 1.0;
    double eps_end = 0.05;
    double eps_decay_fraction = 0.5;
    int batch = 64;
    std::size_t buffer_capacity = 100000;
    std::size_t warmup_transitions = 500;
    double learning_rate = 1e-3;
    std::vector<int> hidden_widths{256, 256};
    std::uint64_t seed = 0;
    // Drop edges whose refit |OLS coefficient| is below this (coefficient
    // threshold pruning, not CAM). Disabled when empty.
    std::optional<double> prune_threshold;

    // Throws ConfigError on the first violated invariant.
    void validate() const;
    int resolved_budget(int p) const { return budget.value_or(4 * p); }
    int resolved_horizon(int p) const { return horizon.value_or(std::max(1, 2 * p)); }
};

// r = (S(A') - S(A)) / p - lambda * |A'|_0 - c.
double reward(double score_before, double score_after, int next_edges, int p, const AgentConfig& cfg);

// Linear decay eps_start -> eps_end over the first eps_decay_fraction of all
// steps, constant afterwards.
double epsilon_at(long long step, long long total_steps, const AgentConfig& cfg);

// Uniform over the legal indices; nullopt when none are legal.
std::optional<ActionIndex> explore_action(const std::vector<bool>& mask, Rng& rng);
// Argmax over legal indices; ties go to the smallest index.
std::optional<ActionIndex> greedy_action(const Eigen::VectorXd& q_values, const std::vector<bool>& mask);
// Epsilon-greedy over the legal indices. The network is evaluated only on exploit draws.
std::optional<ActionIndex> select_action(const QNetwork& q, const Dag& state, const std::vector<bool>& mask,
                                         double eps, Rng& rng);

// y_i = r_i + gamma * Qtarget(A'_i, argmax_{legal k} Qonline(A'_i, k)); terminal items use y_i = r_i.
std::vector<double> double_dqn_targets(std::span<const Transition* const> batch, const QNetwork& online,
                                       const QNetwork& target, double gamma, int budget);

struct StepOutcome {
    Dag next;
    double reward = 0.0;
    bool valid = true;
    double score_after = 0.0;
};

// One environment transition. Illegal actions leave the state unchanged and
// pay -invalid_penalty.
StepOutcome environment_step(const Scorer& scorer, const Dag& state, double score_before, ActionIndex action,
                             int budget, const AgentConfig& cfg);

// Refit each node on its parents and drop edges with |coefficient| < threshold.
// Continuous data only; binary data is returned unchanged.
Dag prune_by_coefficient(const ScoredDataset& data, const Dag& g, double threshold);

struct ChampionEntry {
    int episode = 0;
    int step = 0;
    double score = 0.0;
    int edge_count = 0;
};

struct RunReport {
    AgentConfig config;
    int p = 0;
    int n = 0;
    DataKind kind = DataKind::CopulaGaussian;
    int budget = 0;
    int horizon = 0;

    Dag warm;
    ScoreValue warm_score;
    Dag champion;
    ScoreValue champion_score;
    std::vector<ChampionEntry> champion_trajectory;
    std::vector<Dag> champion_graphs;  // parallel to champion_trajectory
    // Champion score at every episode e with e % champion_period == 0.
    std::vector<std::pair<int, double>> periodic_champion;
    std::vector<std::vector<double>> episode_scores;  // S_n of every visited state, per episode
    std::vector<double> episode_loss;                 // mean minibatch loss per episode (NaN before warmup)

    Dag output;
    ScoreValue output_score;
    std::string output_source;  // "champion", "pruned-champion" or "opponent"
    bool pruned_non_cam = false;
    bool safety_passed = false;

    long long steps = 0;
    long long gradient_steps = 0;
    long long invalid_actions = 0;
    long long feasibility_violations = 0;
    double wall_seconds = 0.0;
};

// Double-DQN refinement of `warm` under the scorer's BIC (every episode
// restarts at `warm`). Returns G_out = argmax{S(champion), S(warm)}.
RunReport train(const Scorer& scorer, const Dag& warm, const AgentConfig& cfg);

}  // namespace ddqncd
