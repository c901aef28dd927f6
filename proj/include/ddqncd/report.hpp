#pragma once

#include <string>

#include "json.hpp"

#include "ddqncd/agent.hpp"
#include "ddqncd/dag.hpp"

namespace ddqncd {

using Json = nlohmann::json;

// Inline 0/1 rows.
Json adjacency_json(const Dag& g);
Json to_json(const ScoreValue& s);
Json to_json(const AgentConfig& cfg);

// Overwrites the fields present in `j`. Unknown keys and wrongly typed values
// raise ConfigError; invariants are left to AgentConfig::validate.
void merge_agent_config(const Json& j, AgentConfig& cfg);

Json to_json(const RunReport& rep);

// Writes `doc` pretty-printed; IoError when the file cannot be written.
void write_json_file(const std::string& path, const Json& doc);

}  // namespace ddqncd
