#include "ddqncd/report.hpp"

#include <cmath>
#include <fstream>

#include "ddqncd/errors.hpp"

namespace ddqncd {

namespace {

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

template <class T>
T get_as(const Json& j, const std::string& key) {
    try {
        return j.get<T>();
    } catch (const Json::exception&) {
        throw ConfigError("agent config: '" + key + "' has the wrong type");
    }
}

}  // namespace

Json adjacency_json(const Dag& g) { return Json(g.to_matrix()); }

Json to_json(const ScoreValue& s) {
    return {{"total", s.total}, {"loglik", s.loglik}, {"penalty", s.penalty}, {"k", s.k}, {"clamped", s.clamped}};
}

Json to_json(const AgentConfig& c) {
    Json j = {
        {"gamma", c.gamma},
        {"tau", c.tau},
        {"lambda_sparsity", c.lambda_sparsity},
        {"step_cost", c.step_cost},
        {"invalid_penalty", c.invalid_penalty},
        {"budget", c.budget ? Json(*c.budget) : Json(nullptr)},
        {"horizon", c.horizon ? Json(*c.horizon) : Json(nullptr)},
        {"episodes", c.episodes},
        {"champion_period", c.champion_period},
        {"eps_start", c.eps_start},
        {"eps_end", c.eps_end},
        {"eps_decay_fraction", c.eps_decay_fraction},
        {"batch", c.batch},
        {"buffer_capacity", c.buffer_capacity},
        {"warmup_transitions", c.warmup_transitions},
        {"learning_rate", c.learning_rate},
        {"hidden_widths", c.hidden_widths},
        {"seed", c.seed},
        {"prune_threshold", c.prune_threshold ? Json(*c.prune_threshold) : Json(nullptr)},
    };
    return j;
}

void merge_agent_config(const Json& j, AgentConfig& c) {
    if (!j.is_object()) throw ConfigError("agent config must be a JSON object");
    for (const auto& [key, v] : j.items()) {
        if (key == "gamma") c.gamma = get_as<double>(v, key);
        else if (key == "tau") c.tau = get_as<double>(v, key);
        else if (key == "lambda_sparsity") c.lambda_sparsity = get_as<double>(v, key);
        else if (key == "step_cost") c.step_cost = get_as<double>(v, key);
        else if (key == "invalid_penalty") c.invalid_penalty = get_as<double>(v, key);
        else if (key == "budget") c.budget = v.is_null() ? std::nullopt : std::optional<int>(get_as<int>(v, key));
        else if (key == "horizon") c.horizon = v.is_null() ? std::nullopt : std::optional<int>(get_as<int>(v, key));
        else if (key == "episodes") c.episodes = get_as<int>(v, key);
        else if (key == "champion_period") c.champion_period = get_as<int>(v, key);
        else if (key == "eps_start") c.eps_start = get_as<double>(v, key);
        else if (key == "eps_end") c.eps_end = get_as<double>(v, key);
        else if (key == "eps_decay_fraction") c.eps_decay_fraction = get_as<double>(v, key);
        else if (key == "batch") c.batch = get_as<int>(v, key);
        else if (key == "buffer_capacity") c.buffer_capacity = get_as<std::size_t>(v, key);
        else if (key == "warmup_transitions") c.warmup_transitions = get_as<std::size_t>(v, key);
        else if (key == "learning_rate") c.learning_rate = get_as<double>(v, key);
        else if (key == "hidden_widths") c.hidden_widths = get_as<std::vector<int>>(v, key);
        else if (key == "seed") c.seed = get_as<std::uint64_t>(v, key);
        else if (key == "prune_threshold")
            c.prune_threshold = v.is_null() ? std::nullopt : std::optional<double>(get_as<double>(v, key));
        else throw ConfigError("agent config: unknown key '" + key + "'");
    }
}

Json to_json(const RunReport& r) {
    Json trajectory = Json::array();
    for (const auto& c : r.champion_trajectory) {
        trajectory.push_back({{"episode", c.episode}, {"step", c.step}, {"score", c.score}, {"edge_count", c.edge_count}});
    }
    Json periodic = Json::array();
    for (const auto& [e, s] : r.periodic_champion) periodic.push_back({{"episode", e}, {"score", s}});
    Json losses = Json::array();
    for (double l : r.episode_loss) losses.push_back(finite_or_null(l));

    return {
        {"config", to_json(r.config)},
        {"seed", r.config.seed},
        {"data", {{"n", r.n}, {"p", r.p}, {"scorer", to_string(r.kind)}}},
        {"budget", r.budget},
        {"horizon", r.horizon},
        {"warm_start", {{"score", to_json(r.warm_score)}, {"adjacency", adjacency_json(r.warm)}}},
        {"champion", {{"score", to_json(r.champion_score)}, {"adjacency", adjacency_json(r.champion)}}},
        {"champion_trajectory", trajectory},
        {"periodic_champion", periodic},
        {"episode_scores", r.episode_scores},
        {"episode_loss", losses},
        {"output",
         {{"source", r.output_source},
          {"pruned_non_cam", r.pruned_non_cam},
          {"score", to_json(r.output_score)},
          {"edge_count", r.output.edge_count()},
          {"adjacency", adjacency_json(r.output)}}},
        {"safety", {{"passed", r.safety_passed}, {"output_score", r.output_score.total}, {"warm_score", r.warm_score.total}}},
        {"counters",
         {{"steps", r.steps},
          {"gradient_steps", r.gradient_steps},
          {"invalid_actions", r.invalid_actions},
          {"feasibility_violations", r.feasibility_violations}}},
        {"wall_seconds", r.wall_seconds},
    };
}

void write_json_file(const std::string& path, const Json& doc) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("failed while writing " + path);
}

}  // namespace ddqncd
