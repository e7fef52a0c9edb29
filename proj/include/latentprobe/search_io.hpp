#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "latentprobe/search.hpp"

namespace latentprobe {

// SearchConfig JSON keys: N, T, D, alpha_start, alpha_step, alpha_max,
// beta_start, beta_step, beta_max, max_rounds_per_stage, seed, fine_stage,
// threads. Missing keys take defaults; unknown keys are rejected.
SearchConfig search_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SearchConfig& config);

nlohmann::json to_json(const RoundRecord& record);
nlohmann::json to_json(const SearchTrace& trace);
nlohmann::json to_json(const SearchResult& result);

SearchTrace trace_from_json(const nlohmann::json& j);
SearchResult search_result_from_json(const nlohmann::json& j);

}  // namespace latentprobe
