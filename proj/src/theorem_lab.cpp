#include "ddqncd/theorem_lab.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "ddqncd/errors.hpp"
#include "ddqncd/parallel.hpp"
#include "ddqncd/score.hpp"

namespace ddqncd {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::ofstream open_csv(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << std::setprecision(17);
    return out;
}

void finish_csv(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw IoError("failed while writing " + path);
}

}  // namespace

CandidateSet::CandidateSet(Dag opponent) { items_.push_back({"opponent", std::move(opponent)}); }

bool CandidateSet::add(std::string label, Dag g) {
    if (g.p() != items_.front().graph.p()) throw DataError("candidate has the wrong node count");
    for (const auto& c : items_) {
        if (markov_equivalent(c.graph, g)) return false;
    }
    items_.push_back({std::move(label), std::move(g)});
    return true;
}

std::uint64_t CandidateSet::fingerprint() const {
    std::uint64_t h = mix_seed(items_.size());
    for (const auto& c : items_) {
        h = mix_seed(h ^ c.graph.hash());
        h = mix_seed(h ^ std::hash<std::string>{}(c.label));
    }
    return h;
}

CandidateSet build_candidate_set(const Scorer& train, const CandidateConfig& cfg) {
    const int p = train.data().p();
    const int budget = cfg.agent.resolved_budget(p);
    CandidateSet set(make_warm_start(cfg.opponent, train, budget));
    const RunReport rep = ddqncd::train(train, set[0].graph, cfg.agent);
    int k = 0;
    for (std::size_t i = 1; i < rep.champion_graphs.size(); ++i) {
        if (set.add("agent-snapshot-" + std::to_string(k), rep.champion_graphs[i])) ++k;
    }
    const std::size_t base = set.size();
    int m = 0;
    for (std::size_t i = 0; i < base; ++i) {
        if (set.add("pruned-variant-" + std::to_string(m), prune_by_coefficient(train.data(), set[i].graph, cfg.prune_threshold))) ++m;
    }
    return set;
}

double population_score(const ScoredDataset& pool, const Dag& g, int n) {
    if (n < 1) throw ConfigError("population_score needs n >= 1");
    const ScoreValue s = score(pool, g);
    const double mu = s.loglik / pool.n();
    return mu - static_cast<double>(s.k) * std::log(static_cast<double>(n)) / (2.0 * n);
}

std::size_t select_empirical(std::span<const double> scores, std::size_t preferred) {
    if (scores.empty()) throw UndefinedQuantity("argmax over an empty candidate set");
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        if (scores[i] > scores[best]) best = i;
    }
    if (preferred < scores.size() && scores[preferred] == scores[best]) return preferred;
    return best;
}

TopTwo top_two(std::span<const double> values) {
    if (values.size() < 2) throw UndefinedQuantity("best/second-best gap needs at least two candidates");
    TopTwo t;
    t.best = select_empirical(values, 0);
    t.second = t.best == 0 ? 1 : 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i != t.best && values[i] > values[t.second]) t.second = i;
    }
    t.gap = values[t.best] - values[t.second];
    return t;
}

SelectionPoint tabulate_selection(int n, const std::vector<std::vector<double>>& trial_scores,
                                  std::span<const double> population, const std::vector<std::string>& labels,
                                  std::vector<SelectionTrialResult>* rows) {
    const TopTwo pop = top_two(population);
    SelectionPoint pt;
    pt.n = n;
    pt.trials = static_cast<int>(trial_scores.size());
    pt.gap = pop.gap;
    pt.best = labels.at(pop.best);
    for (std::size_t t = 0; t < trial_scores.size(); ++t) {
        const auto& s = trial_scores[t];
        const std::size_t chosen = select_empirical(s, 0);
        const TopTwo emp = top_two(s);
        const bool miss = chosen != pop.best;
        pt.misselections += miss;
        if (rows) {
            rows->push_back({n, static_cast<int>(t), labels.at(chosen), pt.best, emp.gap / n, miss});
        }
    }
    pt.misselection_rate = pt.trials ? static_cast<double>(pt.misselections) / pt.trials : 0.0;
    return pt;
}

SelectionConfig SelectionConfig::paper_scale() {
    SelectionConfig c;
    c.sem.p = 30;
    c.trials = 40;
    c.sample_sizes = {400, 600, 800, 1000};
    return c;
}

void SelectionConfig::validate() const {
    sem.validate();
    if (sample_sizes.empty()) throw ConfigError("selection: sample_sizes must not be empty");
    for (int n : sample_sizes) {
        if (n < 3) throw ConfigError("selection: every sample size must be >= 3");
    }
    if (trials < 1) throw ConfigError("selection: trials must be >= 1");
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ConfigError("selection: train_fraction must lie in (0, 1)");
    if (pool_rows < 3) throw ConfigError("selection: pool_rows must be >= 3");
    if (threads < 1) throw ConfigError("selection: threads must be >= 1");
    candidates.opponent.validate();
    candidates.agent.validate();
}

SelectionOutcome run_selection(const WeightedDag& truth, const CandidateSet& candidates, const ScoredDataset& pool,
                               const std::vector<int>& sample_sizes, int trials, std::uint64_t seed, int threads) {
    const auto t0 = std::chrono::steady_clock::now();
    if (candidates.size() < 2) throw UndefinedQuantity("selection needs at least two candidates (|C| = " +
                                                       std::to_string(candidates.size()) + ")");
    SelectionOutcome out;
    out.truth = truth;
    out.candidates = candidates;
    const std::uint64_t before = candidates.fingerprint();
    const std::size_t m = candidates.size();
    std::vector<std::string> labels;
    for (const auto& c : candidates.items()) labels.push_back(c.label);

    for (int n : sample_sizes) {
        std::vector<double> pop(m);
        for (std::size_t c = 0; c < m; ++c) pop[c] = population_score(pool, candidates[c].graph, n);

        std::vector<std::vector<double>> scores(static_cast<std::size_t>(trials), std::vector<double>(m));
        parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t t) {
            const auto raw = simulate_sem(truth, n, derive_seed(seed, {0x5e1ULL, static_cast<std::uint64_t>(n), t}));
            const auto data = ScoredDataset::copula(raw);
            for (std::size_t c = 0; c < m; ++c) scores[t][c] = score(data, candidates[c].graph).total;
        });
        out.curve.push_back(tabulate_selection(n, scores, pop, labels, &out.trials));
    }
    out.candidates_unchanged = candidates.fingerprint() == before && out.candidates.fingerprint() == before;
    out.wall_seconds = seconds_since(t0);
    return out;
}

SelectionOutcome selection_experiment(const SelectionConfig& cfg) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    SemSpec sem = cfg.sem;
    sem.seed = derive_seed(cfg.seed, {0x5e2ULL});
    const WeightedDag truth = random_dag(sem);

    const int pool_rows = cfg.pool_rows;
    const int total = static_cast<int>(std::ceil(pool_rows / (1.0 - cfg.train_fraction)));
    const auto raw = simulate_sem(truth, total, derive_seed(cfg.seed, {0x5e3ULL}));
    const RowSplit split = split_rows(raw, cfg.train_fraction, derive_seed(cfg.seed, {0x5e4ULL}));

    auto train_data = std::make_shared<const ScoredDataset>(ScoredDataset::copula(split.train));
    const Scorer train_scorer(train_data);
    CandidateConfig cc = cfg.candidates;
    cc.agent.seed = derive_seed(cfg.seed, {0x5e5ULL, cc.agent.seed});
    const CandidateSet candidates = build_candidate_set(train_scorer, cc);
    const ScoredDataset pool = ScoredDataset::copula(split.pool);

    SelectionOutcome out = run_selection(truth, candidates, pool, cfg.sample_sizes, cfg.trials,
                                         derive_seed(cfg.seed, {0x5e6ULL}), cfg.threads);
    for (const auto& c : candidates.items()) out.candidate_train_scores.push_back(train_scorer.score(c.graph).total);
    out.wall_seconds = seconds_since(t0);
    return out;
}

SelectionVerdict judge_selection(const std::vector<SelectionPoint>& curve) {
    SelectionVerdict v;
    v.rate_ok = true;
    v.gap_ok = true;
    for (std::size_t i = 1; i < curve.size(); ++i) {
        const double rise = curve[i].misselection_rate - curve[i - 1].misselection_rate;
        if (rise > 0.0) {
            ++v.inversions;
            const double allowed = 1.0 / std::max(1, curve[i].trials);
            if (rise > allowed + 1e-12) v.rate_ok = false;
        }
        if (curve[i].gap < curve[i - 1].gap) v.gap_ok = false;
    }
    if (v.inversions > 1) v.rate_ok = false;
    return v;
}

double sample_bound_real(double lipschitz, double gap, long long num_candidates, double fail_prob) {
    if (!(lipschitz > 0.0) || !std::isfinite(lipschitz)) throw ConfigError("sample_bound: L must be positive");
    if (num_candidates < 1) throw ConfigError("sample_bound: |C| must be >= 1");
    if (!(fail_prob > 0.0 && fail_prob < 1.0)) throw ConfigError("sample_bound: failure probability must lie in (0, 1)");
    if (gap == 0.0) throw UndefinedQuantity("sample_bound: gap is zero, the bound is unbounded");
    if (!(gap > 0.0) || !std::isfinite(gap)) throw ConfigError("sample_bound: gap must be positive");
    return 8.0 * lipschitz * lipschitz / (gap * gap) * std::log(2.0 * static_cast<double>(num_candidates) / fail_prob);
}

long long sample_bound(double lipschitz, double gap, long long num_candidates, double fail_prob) {
    const double v = std::ceil(sample_bound_real(lipschitz, gap, num_candidates, fail_prob));
    if (!(v < 9.0e18)) throw UndefinedQuantity("sample_bound: result does not fit in 64 bits");
    return static_cast<long long>(v);
}

std::uint64_t graph_code(const Dag& g) {
    std::uint64_t code = 0;
    int bit = 0;
    for (int i = 0; i < g.p(); ++i) {
        for (int j = 0; j < g.p(); ++j) {
            if (i == j) continue;
            if (g.has_edge(i, j)) code |= std::uint64_t{1} << bit;
            ++bit;
        }
    }
    return code;
}

std::vector<Dag> enumerate_dags(int p, int budget) {
    if (p < 1 || p > 5) throw ConfigError("enumerate_dags supports 1 <= p <= 5");
    const int slots = p * (p - 1);
    std::vector<Dag> out;
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(p), std::vector<int>(static_cast<std::size_t>(p), 0));
    for (std::uint64_t code = 0; code < (std::uint64_t{1} << slots); ++code) {
        if (std::popcount(code) > budget) continue;
        int bit = 0;
        for (int i = 0; i < p; ++i) {
            for (int j = 0; j < p; ++j) {
                if (i == j) continue;
                adj[i][j] = static_cast<int>((code >> bit) & 1U);
                ++bit;
            }
        }
        if (is_acyclic(adj)) out.push_back(Dag::from_matrix(adj));
    }
    return out;
}

void HittingConfig::validate() const {
    if (p < 2 || p > 5) throw ConfigError("hitting: p must lie in [2, 5]");
    if (n < 3) throw ConfigError("hitting: n must be >= 3");
    if (repeats < 1) throw ConfigError("hitting: repeats must be >= 1");
    if (episodes_cap < 1) throw ConfigError("hitting: episodes_cap must be >= 1");
    if (!(eps > 0.0 && eps <= 1.0)) throw ConfigError("hitting: eps must lie in (0, 1]");
    if (budget && *budget < 0) throw ConfigError("hitting: budget must be >= 0");
    if (horizon && *horizon < 1) throw ConfigError("hitting: horizon must be >= 1");
    for (int d : distances) {
        if (d < 0) throw ConfigError("hitting: distances must be >= 0");
    }
}

std::vector<std::optional<int>> improving_distances(const Scorer& scorer, const std::vector<Dag>& dags,
                                                    const Dag& target, int budget) {
    std::unordered_map<std::uint64_t, std::size_t> index;
    for (std::size_t i = 0; i < dags.size(); ++i) index.emplace(graph_code(dags[i]), i);
    const int p = target.p();

    // Reverse adjacency of the "strictly improving edit" relation.
    std::vector<std::vector<std::size_t>> into(dags.size());
    for (std::size_t i = 0; i < dags.size(); ++i) {
        const auto mask = valid_action_mask(dags[i], budget);
        for (std::size_t a = 0; a < mask.size(); ++a) {
            if (!mask[a]) continue;
            const EdgeEdit e = decode(static_cast<ActionIndex>(a), p);
            if (scorer.delta(dags[i], e) <= kMinImprovement) continue;
            const Dag next = std::get<Dag>(apply_edit(dags[i], e, budget));
            into[index.at(graph_code(next))].push_back(i);
        }
    }
    std::vector<std::optional<int>> dist(dags.size());
    const auto t = index.find(graph_code(target));
    if (t == index.end()) return dist;
    std::deque<std::size_t> queue{t->second};
    dist[t->second] = 0;
    while (!queue.empty()) {
        const std::size_t v = queue.front();
        queue.pop_front();
        for (std::size_t u : into[v]) {
            if (!dist[u]) {
                dist[u] = *dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    return dist;
}

std::optional<int> episodes_to_hit(const Dag& warm, const Dag& target, int budget, int horizon, int episodes_cap,
                                   Rng& rng) {
    if (warm == target) return 1;
    for (int episode = 1; episode <= episodes_cap; ++episode) {
        Dag state = warm;
        for (int t = 0; t < horizon; ++t) {
            const auto mask = valid_action_mask(state, budget);
            const auto a = explore_action(mask, rng);
            if (!a) break;
            state = std::get<Dag>(apply_edit(state, decode(*a, state.p()), budget));
            if (state == target) return episode;
        }
    }
    return std::nullopt;
}

HittingOutcome hitting_time_experiment(const HittingConfig& cfg) {
    cfg.validate();
    const int p = cfg.p;
    const int budget = cfg.budget.value_or(4 * p);
    const int horizon = cfg.horizon.value_or(2 * p);

    WeightedDag chain{Dag(p), Eigen::MatrixXd::Zero(p, p)};
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i + 1 < p; ++i) {
        edges.emplace_back(i, i + 1);
        chain.weights(i, i + 1) = cfg.chain_weight;
    }
    chain.dag = Dag::from_edges(p, edges);
    const auto raw = simulate_sem(chain, cfg.n, derive_seed(cfg.seed, {0x417ULL}));
    const Scorer scorer(std::make_shared<const ScoredDataset>(ScoredDataset::copula(raw)));

    const auto dags = enumerate_dags(p, budget);
    HittingOutcome out;
    // G*: highest score; graphs within kMinImprovement of it tie and resolve to the smallest code.
    double top = -std::numeric_limits<double>::infinity();
    std::vector<double> scores(dags.size());
    for (std::size_t i = 0; i < dags.size(); ++i) {
        scores[i] = scorer.score(dags[i]).total;
        top = std::max(top, scores[i]);
        out.a_max = std::max<int>(out.a_max, static_cast<int>(std::ranges::count(valid_action_mask(dags[i], budget), true)));
    }
    for (std::size_t i = 0; i < dags.size(); ++i) {
        if (scores[i] >= top - kMinImprovement) {
            out.target = dags[i];
            out.target_score = scores[i];
            break;
        }
    }
    const auto dist = improving_distances(scorer, dags, out.target, budget);

    out.bound_ok = true;
    out.monotone_ok = true;
    for (int d : cfg.distances) {
        HittingRow row;
        row.d = d;
        auto it = std::find(dist.begin(), dist.end(), std::optional<int>(d));
        if (it == dist.end()) throw ConfigError("hitting: no DAG lies at improving distance " + std::to_string(d));
        row.warm = dags[static_cast<std::size_t>(it - dist.begin())];
        row.bound = std::pow(out.a_max / cfg.eps, d);

        Rng rng(derive_seed(cfg.seed, {0x418ULL, static_cast<std::uint64_t>(d)}));
        std::vector<double> hits;
        for (int r = 0; r < cfg.repeats; ++r) {
            const auto h = episodes_to_hit(row.warm, out.target, budget, horizon, cfg.episodes_cap, rng);
            if (h) hits.push_back(*h);
            else ++row.censored;
        }
        row.repeats = static_cast<int>(hits.size());
        if (!hits.empty()) {
            const double mean = std::accumulate(hits.begin(), hits.end(), 0.0) / hits.size();
            double ss = 0.0;
            for (double h : hits) ss += (h - mean) * (h - mean);
            row.mean_episodes = mean;
            row.std_error = hits.size() > 1 ? std::sqrt(ss / (hits.size() - 1) / hits.size()) : 0.0;
        }
        row.within_bound = row.repeats > 0 && row.mean_episodes <= row.bound;
        out.bound_ok = out.bound_ok && row.within_bound;
        out.rows.push_back(std::move(row));
    }
    // One-sided 95% check that the mean does not drop as d grows.
    for (std::size_t i = 1; i < out.rows.size(); ++i) {
        const auto& a = out.rows[i - 1];
        const auto& b = out.rows[i];
        if (b.d < a.d) continue;
        const double diff = b.mean_episodes - a.mean_episodes;
        const double se = std::hypot(a.std_error, b.std_error);
        if (diff < 0.0 && (se == 0.0 || diff / se < -1.6448536269514722)) out.monotone_ok = false;
    }
    return out;
}

SafetyVerdict safety_audit(std::span<const RunReport> reports) {
    SafetyVerdict v;
    v.runs = reports.size();
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        if (!(r.output_score.total >= r.warm_score.total)) {
            v.violations.push_back({i, r.output_score.total, r.warm_score.total});
        }
    }
    return v;
}

SafetyOutcome safety_experiment(const SafetyConfig& cfg) {
    cfg.sem.validate();
    cfg.opponent.validate();
    cfg.agent.validate();
    if (cfg.runs < 0) throw ConfigError("safety: runs must be >= 0");
    if (cfg.n < 3) throw ConfigError("safety: n must be >= 3");
    const auto t0 = std::chrono::steady_clock::now();
    SafetyOutcome out;
    out.reports.resize(static_cast<std::size_t>(cfg.runs));
    parallel_for(out.reports.size(), cfg.threads, [&](std::size_t r) {
        SemSpec sem = cfg.sem;
        sem.seed = derive_seed(cfg.seed, {0x5afULL, r});
        const WeightedDag truth = random_dag(sem);
        const auto raw = simulate_sem(truth, cfg.n, derive_seed(cfg.seed, {0x5b0ULL, r}));
        const Scorer scorer(std::make_shared<const ScoredDataset>(ScoredDataset::copula(raw)));
        AgentConfig agent = cfg.agent;
        agent.seed = derive_seed(cfg.seed, {0x5b1ULL, r});
        const Dag warm = make_warm_start(cfg.opponent, scorer, agent.resolved_budget(sem.p));
        out.reports[r] = train(scorer, warm, agent);
    });
    out.verdict = safety_audit(out.reports);
    out.wall_seconds = seconds_since(t0);
    return out;
}

void write_selection_trials_csv(const std::string& path, const std::vector<SelectionTrialResult>& rows) {
    auto out = open_csv(path);
    out << "n,trial,selected,best,misselected,gap\n";
    for (const auto& r : rows) {
        out << r.n << ',' << r.trial << ',' << r.selected << ',' << r.best << ',' << (r.misselected ? 1 : 0) << ','
            << r.empirical_gap << '\n';
    }
    finish_csv(out, path);
}

void write_selection_summary_csv(const std::string& path, const std::vector<SelectionPoint>& curve) {
    auto out = open_csv(path);
    out << "n,rate,gap\n";
    for (const auto& c : curve) out << c.n << ',' << c.misselection_rate << ',' << c.gap << '\n';
    finish_csv(out, path);
}

void write_hitting_csv(const std::string& path, const HittingOutcome& h) {
    auto out = open_csv(path);
    out << "d,mean_episodes,std_error,bound,repeats,censored,within_bound\n";
    for (const auto& r : h.rows) {
        out << r.d << ',' << r.mean_episodes << ',' << r.std_error << ',' << r.bound << ',' << r.repeats << ','
            << r.censored << ',' << (r.within_bound ? 1 : 0) << '\n';
    }
    finish_csv(out, path);
}

void write_safety_csv(const std::string& path, const std::vector<RunReport>& reports) {
    auto out = open_csv(path);
    out << "run,warm_score,output_score,output_source,passed\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        out << i << ',' << r.warm_score.total << ',' << r.output_score.total << ',' << r.output_source << ','
            << (r.safety_passed ? 1 : 0) << '\n';
    }
    finish_csv(out, path);
}

}  // namespace ddqncd
