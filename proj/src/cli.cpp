#include "ddqncd/cli.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "ddqncd/agent.hpp"
#include "ddqncd/dataset.hpp"
#include "ddqncd/errors.hpp"
#include "ddqncd/graph_io.hpp"
#include "ddqncd/metrics.hpp"
#include "ddqncd/opponent.hpp"
#include "ddqncd/parallel.hpp"
#include "ddqncd/report.hpp"
#include "ddqncd/score.hpp"
#include "ddqncd/sem.hpp"
#include "ddqncd/theorem_lab.hpp"

namespace ddqncd {

std::string format_number(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    std::string s(buf, end);
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

namespace {

namespace fs = std::filesystem;

struct Globals {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
    std::optional<int> threads;
};

void check_keys(const Json& cfg, std::initializer_list<const char*> allowed, const std::string& where) {
    for (const auto& [key, v] : cfg.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

Json load_config(const std::string& path) {
    if (path.empty()) return Json::object();
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    try {
        Json j = Json::parse(in);
        if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
        check_keys(j, {"seed", "threads", "agent", "opponent", "sem", "safety", "hitting", "selection", "simulate"},
                   "config");
        return j;
    } catch (const Json::parse_error& e) {
        throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
    }
}

Json section(const Json& cfg, const char* key) {
    if (!cfg.contains(key)) return Json::object();
    const Json& s = cfg.at(key);
    if (!s.is_object()) throw ConfigError(std::string("config section '") + key + "' must be an object");
    return s;
}

template <class T>
void read(const Json& obj, const char* key, T& target) {
    if (!obj.contains(key)) return;
    try {
        target = obj.at(key).get<T>();
    } catch (const Json::exception&) {
        throw ConfigError(std::string("config key '") + key + "' has the wrong type");
    }
}

template <class T>
void override_with(const std::optional<T>& flag, T& target) {
    if (flag) target = *flag;
}

std::uint64_t resolve_seed(const Globals& g, const Json& cfg) {
    std::uint64_t seed = 0;
    read(cfg, "seed", seed);
    override_with(g.seed, seed);
    return seed;
}

int resolve_thread_count(const Globals& g, const Json& cfg) {
    std::optional<int> t = g.threads;
    if (!t && cfg.contains("threads")) {
        int v = 0;
        read(cfg, "threads", v);
        t = v;
    }
    return resolve_threads(t);
}

fs::path prepare_out_dir(const Globals& g) {
    fs::path dir(g.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + g.out_dir);
    return dir;
}

AgentConfig agent_from(const Json& cfg) {
    AgentConfig a;
    merge_agent_config(section(cfg, "agent"), a);
    return a;
}

OpponentSpec opponent_from(const Json& cfg) {
    OpponentSpec s;
    const Json o = section(cfg, "opponent");
    check_keys(o, {"kind", "path", "threshold", "max_iters"}, "opponent");
    std::string kind = "greedy";
    read(o, "kind", kind);
    if (kind == "greedy") s.kind = OpponentKind::GreedySearch;
    else if (kind == "file") s.kind = OpponentKind::ExternalFile;
    else throw ConfigError("opponent.kind must be 'greedy' or 'file'");
    read(o, "path", s.path);
    read(o, "threshold", s.threshold);
    read(o, "max_iters", s.max_iters);
    return s;
}

Json to_json(const OpponentSpec& s) {
    return {{"kind", s.kind == OpponentKind::GreedySearch ? "greedy" : "file"},
            {"path", s.path},
            {"threshold", s.threshold},
            {"max_iters", s.max_iters}};
}

SemSpec sem_from(const Json& cfg, SemSpec s) {
    const Json j = section(cfg, "sem");
    check_keys(j, {"p", "expected_in_degree", "weight_low", "weight_high", "random_sign"}, "sem");
    read(j, "p", s.p);
    read(j, "expected_in_degree", s.expected_in_degree);
    read(j, "weight_low", s.weight_low);
    read(j, "weight_high", s.weight_high);
    read(j, "random_sign", s.random_sign);
    return s;
}

Json to_json(const SemSpec& s) {
    return {{"p", s.p},
            {"expected_in_degree", s.expected_in_degree},
            {"weight_low", s.weight_low},
            {"weight_high", s.weight_high},
            {"random_sign", s.random_sign},
            {"seed", s.seed}};
}

std::vector<int> parse_int_list(const std::string& text, const char* what) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoi(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError(std::string(what) + ": '" + text + "' is not a comma-separated integer list");
        }
    }
    return out;
}

// ---- discover -------------------------------------------------------------

struct DiscoverFlags {
    std::string data_path;
    std::optional<std::string> opponent_file;
    std::optional<double> threshold;
    std::optional<int> episodes, budget, horizon, batch;
    std::optional<std::size_t> warmup;
    std::optional<std::string> hidden;
    std::optional<double> prune;
    std::string report_name = "report.json";
    std::string graph_name = "discovered.csv";
};

int cmd_discover(const Globals& g, const DiscoverFlags& f, std::ostream& out) {
    const Json cfg = load_config(g.config_path);
    AgentConfig agent = agent_from(cfg);
    // agent.seed < top-level seed < --seed
    if (cfg.contains("seed") || g.seed) agent.seed = resolve_seed(g, cfg);
    override_with(f.episodes, agent.episodes);
    if (f.budget) agent.budget = *f.budget;
    if (f.horizon) agent.horizon = *f.horizon;
    override_with(f.batch, agent.batch);
    override_with(f.warmup, agent.warmup_transitions);
    if (f.hidden) agent.hidden_widths = parse_int_list(*f.hidden, "--hidden");
    if (f.prune) agent.prune_threshold = *f.prune;
    agent.validate();

    OpponentSpec opp = opponent_from(cfg);
    if (f.opponent_file) {
        opp.kind = OpponentKind::ExternalFile;
        opp.path = *f.opponent_file;
    }
    override_with(f.threshold, opp.threshold);
    opp.validate();

    const fs::path dir = prepare_out_dir(g);
    const RawTable table = load_dataset_csv(f.data_path);
    auto data = std::make_shared<const ScoredDataset>(ScoredDataset::detect(table.values, table.names));
    const Scorer scorer(data);
    const Dag warm = make_warm_start(opp, scorer, agent.resolved_budget(data->p()));
    const RunReport rep = train(scorer, warm, agent);

    Json doc = to_json(rep);
    doc["resolved_config"] = {{"agent", to_json(agent)}, {"opponent", to_json(opp)}, {"data_path", f.data_path}};
    write_json_file((dir / f.report_name).string(), doc);
    save_adjacency_csv((dir / f.graph_name).string(), rep.output);
    out << "scorer=" << to_string(data->kind()) << " n=" << data->n() << " p=" << data->p() << '\n'
        << "warm_score=" << format_number(rep.warm_score.total) << " output_score="
        << format_number(rep.output_score.total) << " source=" << rep.output_source
        << " edges=" << rep.output.edge_count() << '\n'
        << "safety=" << (rep.safety_passed ? "pass" : "FAIL") << '\n';
    return rep.safety_passed ? kExitOk : kExitVerdictFailed;
}

// ---- simulate -------------------------------------------------------------

struct SimulateFlags {
    std::optional<int> p, n;
    std::optional<double> degree, weight_low, weight_high;
    bool no_sign_flip = false;
    std::string data_name = "data.csv";
    std::string truth_name = "truth.csv";
};

int cmd_simulate(const Globals& g, const SimulateFlags& f, std::ostream& out) {
    const Json cfg = load_config(g.config_path);
    SemSpec sem = sem_from(cfg, SemSpec{});
    int n = 1000;
    const Json sim = section(cfg, "simulate");
    check_keys(sim, {"n"}, "simulate");
    read(sim, "n", n);
    override_with(f.p, sem.p);
    override_with(f.n, n);
    override_with(f.degree, sem.expected_in_degree);
    override_with(f.weight_low, sem.weight_low);
    override_with(f.weight_high, sem.weight_high);
    if (f.no_sign_flip) sem.random_sign = false;
    const std::uint64_t seed = resolve_seed(g, cfg);
    sem.seed = derive_seed(seed, {0x51ULL});
    sem.validate();
    if (n < 1) throw ConfigError("--n must be >= 1");

    const fs::path dir = prepare_out_dir(g);
    const WeightedDag truth = random_dag(sem);
    const Eigen::MatrixXd x = simulate_sem(truth, n, derive_seed(seed, {0x52ULL}));
    const std::string data_path = (dir / f.data_name).string();
    {
        std::ofstream o(data_path);
        if (!o) throw IoError("cannot write " + data_path);
        write_dataset_csv(o, x);
        if (!o) throw IoError("failed while writing " + data_path);
    }
    save_adjacency_csv((dir / f.truth_name).string(), truth.dag);
    out << "wrote " << data_path << " (" << n << " x " << sem.p << ") and " << (dir / f.truth_name).string() << " ("
        << truth.dag.edge_count() << " edges)\n";
    return kExitOk;
}

// ---- verify ---------------------------------------------------------------

struct VerifyFlags {
    std::string theorem;
    std::optional<int> runs, episodes, trials, repeats, n, p;
    std::optional<std::string> hidden, sizes;
    bool paper_scale = false;
    std::vector<std::string> candidates;  // explicit candidate graphs for selection
};

void apply_agent_flags(const VerifyFlags& f, AgentConfig& a) {
    override_with(f.episodes, a.episodes);
    if (f.hidden) a.hidden_widths = parse_int_list(*f.hidden, "--hidden");
}

int verify_safety(const Globals& g, const VerifyFlags& f, const Json& cfg, const fs::path& dir, std::ostream& out) {
    SafetyConfig sc;
    const Json s = section(cfg, "safety");
    check_keys(s, {"runs", "n"}, "safety");
    read(s, "runs", sc.runs);
    read(s, "n", sc.n);
    sc.sem = sem_from(cfg, sc.sem);
    if (cfg.contains("agent")) sc.agent = agent_from(cfg);
    sc.opponent = opponent_from(cfg);
    override_with(f.runs, sc.runs);
    override_with(f.n, sc.n);
    override_with(f.p, sc.sem.p);
    apply_agent_flags(f, sc.agent);
    sc.seed = resolve_seed(g, cfg);
    sc.threads = resolve_thread_count(g, cfg);

    const SafetyOutcome res = safety_experiment(sc);
    write_safety_csv((dir / "safety_runs.csv").string(), res.reports);
    Json violations = Json::array();
    for (const auto& v : res.verdict.violations) {
        violations.push_back({{"run", v.index}, {"output_score", v.output_score}, {"warm_score", v.warm_score}});
    }
    write_json_file((dir / "verify_safety.json").string(),
                    {{"theorem", "safety"},
                     {"passed", res.verdict.passed()},
                     {"runs", res.verdict.runs},
                     {"violations", violations},
                     {"wall_seconds", res.wall_seconds},
                     {"config", {{"agent", to_json(sc.agent)}, {"opponent", to_json(sc.opponent)},
                                 {"sem", to_json(sc.sem)}, {"n", sc.n}, {"seed", sc.seed}}}});
    out << "safety: " << res.verdict.runs - res.verdict.violations.size() << "/" << res.verdict.runs
        << " runs with S(G_out) >= S(warm)\n";
    return res.verdict.passed() ? kExitOk : kExitVerdictFailed;
}

int verify_hitting(const Globals& g, const VerifyFlags& f, const Json& cfg, const fs::path& dir, std::ostream& out) {
    HittingConfig hc;
    const Json h = section(cfg, "hitting");
    check_keys(h, {"p", "chain_weight", "n", "distances", "repeats", "episodes_cap", "eps", "budget", "horizon"},
               "hitting");
    read(h, "p", hc.p);
    read(h, "chain_weight", hc.chain_weight);
    read(h, "n", hc.n);
    read(h, "distances", hc.distances);
    read(h, "repeats", hc.repeats);
    read(h, "episodes_cap", hc.episodes_cap);
    read(h, "eps", hc.eps);
    if (h.contains("budget")) hc.budget = h.at("budget").get<int>();
    if (h.contains("horizon")) hc.horizon = h.at("horizon").get<int>();
    override_with(f.repeats, hc.repeats);
    override_with(f.n, hc.n);
    override_with(f.p, hc.p);
    if (f.sizes) hc.distances = parse_int_list(*f.sizes, "--distances");
    hc.seed = resolve_seed(g, cfg);

    const HittingOutcome res = hitting_time_experiment(hc);
    write_hitting_csv((dir / "hitting.csv").string(), res);
    Json rows = Json::array();
    for (const auto& r : res.rows) {
        rows.push_back({{"d", r.d},
                        {"mean_episodes", r.mean_episodes},
                        {"std_error", r.std_error},
                        {"bound", r.bound},
                        {"censored", r.censored},
                        {"warm_start", adjacency_json(r.warm)}});
    }
    write_json_file((dir / "verify_hitting.json").string(),
                    {{"theorem", "hitting"},
                     {"passed", res.passed()},
                     {"bound_ok", res.bound_ok},
                     {"monotone_ok", res.monotone_ok},
                     {"a_max", res.a_max},
                     {"target", adjacency_json(res.target)},
                     {"rows", rows},
                     {"seed", hc.seed}});
    for (const auto& r : res.rows) {
        out << "d=" << r.d << " mean=" << format_number(r.mean_episodes) << " bound=" << format_number(r.bound)
            << (r.censored ? " censored=" + std::to_string(r.censored) : std::string()) << '\n';
    }
    out << "hitting: " << (res.passed() ? "pass" : "FAIL") << '\n';
    return res.passed() ? kExitOk : kExitVerdictFailed;
}

int verify_selection(const Globals& g, const VerifyFlags& f, const Json& cfg, const fs::path& dir, std::ostream& out) {
    const Json s = section(cfg, "selection");
    check_keys(s, {"paper_scale", "sample_sizes", "trials", "train_fraction", "pool_rows", "prune_threshold"},
               "selection");
    bool paper = f.paper_scale;
    read(s, "paper_scale", paper);
    SelectionConfig sc = paper || f.paper_scale ? SelectionConfig::paper_scale() : SelectionConfig{};
    sc.sem = sem_from(cfg, sc.sem);
    read(s, "sample_sizes", sc.sample_sizes);
    read(s, "trials", sc.trials);
    read(s, "train_fraction", sc.train_fraction);
    read(s, "pool_rows", sc.pool_rows);
    read(s, "prune_threshold", sc.candidates.prune_threshold);
    if (cfg.contains("agent")) sc.candidates.agent = agent_from(cfg);
    sc.candidates.opponent = opponent_from(cfg);
    override_with(f.trials, sc.trials);
    override_with(f.p, sc.sem.p);
    if (f.sizes) sc.sample_sizes = parse_int_list(*f.sizes, "--sizes");
    apply_agent_flags(f, sc.candidates.agent);
    sc.seed = resolve_seed(g, cfg);
    sc.threads = resolve_thread_count(g, cfg);

    SelectionOutcome res;
    if (!f.candidates.empty()) {
        // Explicit candidates: the first file is the opponent.
        sc.validate();
        std::optional<CandidateSet> set;
        for (std::size_t i = 0; i < f.candidates.size(); ++i) {
            Dag gph = load_graph(f.candidates[i]);
            if (gph.p() != sc.sem.p) {
                throw DataError("candidate " + f.candidates[i] + " has " + std::to_string(gph.p()) +
                                " nodes, expected " + std::to_string(sc.sem.p));
            }
            if (!set) set.emplace(std::move(gph));
            else set->add("candidate-" + std::to_string(i), std::move(gph));
        }
        if (set->size() < 2) {
            throw UndefinedQuantity("selection needs at least two distinct candidates (|C| = " +
                                    std::to_string(set->size()) + ")");
        }
        SemSpec sem = sc.sem;
        sem.seed = derive_seed(sc.seed, {0x5e2ULL});
        const WeightedDag truth = random_dag(sem);
        const auto pool = ScoredDataset::copula(simulate_sem(truth, sc.pool_rows, derive_seed(sc.seed, {0x5e3ULL})));
        res = run_selection(truth, *set, pool, sc.sample_sizes, sc.trials, derive_seed(sc.seed, {0x5e6ULL}), sc.threads);
    } else {
        res = selection_experiment(sc);
    }
    const SelectionVerdict v = judge_selection(res.curve);
    write_selection_trials_csv((dir / "selection_trials.csv").string(), res.trials);
    write_selection_summary_csv((dir / "selection_summary.csv").string(), res.curve);
    Json cands = Json::array();
    for (std::size_t i = 0; i < res.candidates.size(); ++i) {
        cands.push_back({{"label", res.candidates[i].label}, {"edges", res.candidates[i].graph.edge_count()}});
    }
    Json curve = Json::array();
    for (const auto& c : res.curve) {
        curve.push_back({{"n", c.n}, {"rate", c.misselection_rate}, {"gap_per_sample", c.gap}, {"best", c.best}});
    }
    write_json_file((dir / "verify_selection.json").string(),
                    {{"theorem", "selection"},
                     {"passed", v.passed()},
                     {"rate_nonincreasing", v.rate_ok},
                     {"gap_nondecreasing", v.gap_ok},
                     {"inversions", v.inversions},
                     {"candidates", cands},
                     {"candidates_unchanged", res.candidates_unchanged},
                     {"curve", curve},
                     {"truth", adjacency_json(res.truth.dag)},
                     {"config", {{"sem", to_json(sc.sem)}, {"trials", sc.trials}, {"sample_sizes", sc.sample_sizes},
                                 {"train_fraction", sc.train_fraction}, {"pool_rows", sc.pool_rows},
                                 {"agent", to_json(sc.candidates.agent)}, {"seed", sc.seed}}},
                     {"wall_seconds", res.wall_seconds}});
    out << "|C|=" << res.candidates.size() << '\n';
    for (const auto& c : res.curve) {
        out << "n=" << c.n << " rate=" << format_number(c.misselection_rate) << " gap=" << format_number(c.gap) << '\n';
    }
    out << "selection: " << (v.passed() ? "pass" : "FAIL") << '\n';
    return v.passed() ? kExitOk : kExitVerdictFailed;
}

int cmd_verify(const Globals& g, const VerifyFlags& f, std::ostream& out) {
    const Json cfg = load_config(g.config_path);
    const fs::path dir = prepare_out_dir(g);
    if (f.theorem == "safety") return verify_safety(g, f, cfg, dir, out);
    if (f.theorem == "hitting") return verify_hitting(g, f, cfg, dir, out);
    return verify_selection(g, f, cfg, dir, out);
}

// ---- metrics / score ------------------------------------------------------

int cmd_metrics(const std::string& est_path, const std::string& truth_path, std::ostream& out) {
    const Dag est = load_graph(est_path);
    const Dag truth = load_graph(truth_path);
    if (est.p() != truth.p()) {
        throw DataError("estimate has " + std::to_string(est.p()) + " nodes but truth has " +
                        std::to_string(truth.p()));
    }
    const StructureMetrics m = structure_metrics(est, truth);
    out << format_number(m.tpr) << ',' << format_number(m.fdr) << ',' << m.shd << ',' << format_number(m.score)
        << '\n';
    return kExitOk;
}

int cmd_score(const std::string& data_path, const std::string& graph_path, std::ostream& out) {
    const RawTable table = load_dataset_csv(data_path);
    const ScoredDataset data = ScoredDataset::detect(table.values, table.names);
    const Dag g = load_graph(graph_path);
    if (g.p() != data.p()) {
        throw DataError("graph has " + std::to_string(g.p()) + " nodes but the dataset has " +
                        std::to_string(data.p()) + " columns");
    }
    const ScoreValue s = score(data, g);
    out << std::setprecision(17) << "scorer,total,loglik,penalty,k\n"
        << to_string(data.kind()) << ',' << s.total << ',' << s.loglik << ',' << s.penalty << ',' << s.k << '\n';
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Causal structure refinement by Double-DQN edge edits under a BIC reward.\n"
                 "Settings resolve as: built-in defaults < --config JSON file < command-line flags."};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config_path, "JSON config file (sections: agent, opponent, sem, simulate, safety, hitting, selection)");
    app.add_option("--seed", g.seed, "Master seed (overrides config 'seed')");
    app.add_option("--out-dir", g.out_dir, "Directory for reports and CSV output")->capture_default_str();
    app.add_option("--threads", g.threads, "Worker threads for experiment trials (fallback: DDQNCD_THREADS)");

    DiscoverFlags df;
    auto* discover = app.add_subcommand("discover", "Learn a DAG from a dataset CSV, warm-started from an opponent");
    discover->add_option("data", df.data_path, "Dataset CSV with a header row")->required();
    discover->add_option("--opponent-file", df.opponent_file, "External opponent adjacency (weighted or 0/1 CSV)");
    discover->add_option("--threshold", df.threshold, "Binarization threshold for weighted opponent files");
    discover->add_option("--episodes", df.episodes, "Training episodes E");
    discover->add_option("--budget", df.budget, "Edge budget B (default 4p)");
    discover->add_option("--horizon", df.horizon, "Steps per episode T (default 2p)");
    discover->add_option("--batch", df.batch, "Minibatch size");
    discover->add_option("--warmup", df.warmup, "Transitions stored before learning starts");
    discover->add_option("--hidden", df.hidden, "Hidden widths, e.g. 256,256");
    discover->add_option("--prune", df.prune, "Also try the champion with |OLS coefficient| < value edges dropped (not CAM)");
    discover->add_option("--report", df.report_name, "Report file name inside --out-dir")->capture_default_str();
    discover->add_option("--graph-out", df.graph_name, "Adjacency CSV name inside --out-dir")->capture_default_str();

    SimulateFlags sf;
    auto* simulate = app.add_subcommand("simulate", "Sample a random linear-Gaussian SEM and write data + truth");
    simulate->add_option("--p", sf.p, "Node count");
    simulate->add_option("--n", sf.n, "Sample count");
    simulate->add_option("--degree", sf.degree, "Expected in-degree");
    simulate->add_option("--weight-low", sf.weight_low, "Smallest |edge weight|");
    simulate->add_option("--weight-high", sf.weight_high, "Largest |edge weight|");
    simulate->add_flag("--no-sign-flip", sf.no_sign_flip, "Keep all edge weights positive");
    simulate->add_option("--data-out", sf.data_name, "Data CSV name inside --out-dir")->capture_default_str();
    simulate->add_option("--truth-out", sf.truth_name, "Truth adjacency CSV name inside --out-dir")->capture_default_str();

    VerifyFlags vf;
    auto* verify = app.add_subcommand("verify", "Run a guarantee check: safety, hitting or selection");
    verify->add_option("theorem", vf.theorem, "safety | hitting | selection")
        ->required()
        ->check(CLI::IsMember({"safety", "hitting", "selection"}));
    verify->add_option("--runs", vf.runs, "safety: number of end-to-end runs");
    verify->add_option("--episodes", vf.episodes, "safety/selection: agent episodes per run");
    verify->add_option("--hidden", vf.hidden, "safety/selection: hidden widths, e.g. 64,64");
    verify->add_option("--n", vf.n, "safety: samples per run; hitting: samples for the scorer");
    verify->add_option("--p", vf.p, "Node count of the synthetic SEM");
    verify->add_option("--trials", vf.trials, "selection: trials per sample size");
    verify->add_option("--repeats", vf.repeats, "hitting: repeats per distance");
    verify->add_option("--sizes", vf.sizes, "selection: sample sizes; hitting: distances (comma-separated)");
    verify->add_flag("--paper-scale", vf.paper_scale, "selection: p=30, 40 trials, n in {400,600,800,1000}");
    verify->add_option("--candidate", vf.candidates, "selection: explicit candidate graph file (repeatable; first = opponent)");

    std::string est_path, truth_path;
    auto* metrics = app.add_subcommand("metrics", "Print TPR,FDR,SHD,Score of an estimate against a truth graph");
    metrics->add_option("estimate", est_path, "Estimated graph (adjacency CSV or edge list)")->required();
    metrics->add_option("truth", truth_path, "True graph (adjacency CSV or edge list)")->required();

    std::string score_data, score_graph;
    auto* score_cmd = app.add_subcommand("score", "Print the BIC score of a graph on a dataset");
    score_cmd->add_option("data", score_data, "Dataset CSV with a header row")->required();
    score_cmd->add_option("graph", score_graph, "Graph (adjacency CSV or edge list)")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitMalformedInput;
    }

    try {
        // Config file and thread count are checked up front, whatever the command uses.
        resolve_thread_count(g, load_config(g.config_path));
        if (*discover) return cmd_discover(g, df, out);
        if (*simulate) return cmd_simulate(g, sf, out);
        if (*verify) return cmd_verify(g, vf, out);
        if (*metrics) return cmd_metrics(est_path, truth_path, out);
        if (*score_cmd) return cmd_score(score_data, score_graph, out);
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUnwritable;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const UndefinedQuantity& e) {
        err << "undefined: " << e.what() << '\n';
        return kExitConfig;
    } catch (const MalformedGraph& e) {
        err << "malformed graph: " << e.what() << '\n';
        return kExitMalformedInput;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return kExitMalformedInput;
    } catch (const EditRejected& e) {
        err << "data error: " << e.what() << '\n';
        return kExitMalformedInput;
    }
    return kExitMalformedInput;
}

int run_cli(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run_cli(args, std::cout, std::cerr);
}

}  // namespace ddqncd
