#include "latentprobe/search_io.hpp"

#include <set>
#include <string>

namespace latentprobe {

namespace {

constexpr const char* kModule = "search-engine";

template <class T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(kModule, std::string("search config field \"") + key + "\": " + e.what());
    }
}

}  // namespace

SearchConfig search_config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw ConfigError(kModule, "search config must be a JSON object");
    }
    static const std::set<std::string> known{"N",         "T",         "D",         "alpha_start",
                                             "alpha_step", "alpha_max", "beta_start", "beta_step",
                                             "beta_max",  "max_rounds_per_stage", "seed", "fine_stage",
                                             "threads"};
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) {
            throw ConfigError(kModule, "unknown search config field \"" + key + "\"");
        }
    }
    SearchConfig c;
    read_field(j, "N", c.candidates);
    read_field(j, "T", c.threshold);
    read_field(j, "D", c.latent_dim);
    read_field(j, "alpha_start", c.alpha_start);
    read_field(j, "alpha_step", c.alpha_step);
    read_field(j, "alpha_max", c.alpha_max);
    read_field(j, "beta_start", c.beta_start);
    read_field(j, "beta_step", c.beta_step);
    read_field(j, "beta_max", c.beta_max);
    read_field(j, "max_rounds_per_stage", c.max_rounds_per_stage);
    read_field(j, "seed", c.seed);
    read_field(j, "fine_stage", c.fine_stage);
    read_field(j, "threads", c.threads);
    c.validate();
    return c;
}

nlohmann::json to_json(const SearchConfig& c) {
    return nlohmann::json{{"N", c.candidates},
                          {"T", c.threshold},
                          {"D", c.latent_dim},
                          {"alpha_start", c.alpha_start},
                          {"alpha_step", c.alpha_step},
                          {"alpha_max", c.alpha_max},
                          {"beta_start", c.beta_start},
                          {"beta_step", c.beta_step},
                          {"beta_max", c.beta_max},
                          {"max_rounds_per_stage", c.max_rounds_per_stage},
                          {"seed", c.seed},
                          {"fine_stage", c.fine_stage},
                          {"threads", c.threads}};
}

nlohmann::json to_json(const RoundRecord& r) {
    return nlohmann::json{{"stage", std::string(to_string(r.stage))},
                          {"round_index", r.round_index},
                          {"alpha_or_beta", r.alpha_or_beta},
                          {"candidates_evaluated", r.candidates_evaluated},
                          {"best_score_after", r.best_score_after},
                          {"rng_substream_id", r.rng_substream_id}};
}

nlohmann::json to_json(const SearchTrace& trace) {
    auto out = nlohmann::json::array();
    for (const auto& r : trace) {
        out.push_back(to_json(r));
    }
    return out;
}

nlohmann::json to_json(const SearchResult& result) {
    return nlohmann::json{{"best_latent", result.best_latent.values()},
                          {"best_score", result.best_score},
                          {"terminated_by", std::string(to_string(result.terminated_by))},
                          {"trace", to_json(result.trace)}};
}

SearchTrace trace_from_json(const nlohmann::json& j) {
    SearchTrace trace;
    try {
        for (const auto& r : j) {
            trace.push_back(RoundRecord{stage_from_string(r.at("stage").get<std::string>()),
                                        r.at("round_index").get<std::size_t>(),
                                        r.at("alpha_or_beta").get<double>(),
                                        r.at("candidates_evaluated").get<std::size_t>(),
                                        r.at("best_score_after").get<double>(),
                                        r.at("rng_substream_id").get<std::uint64_t>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(kModule, std::string("malformed trace: ") + e.what());
    }
    return trace;
}

SearchResult search_result_from_json(const nlohmann::json& j) {
    try {
        return SearchResult{LatentVector(j.at("best_latent").get<std::vector<double>>()),
                            j.at("best_score").get<double>(),
                            termination_from_string(j.at("terminated_by").get<std::string>()),
                            trace_from_json(j.at("trace"))};
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(kModule, std::string("malformed search result: ") + e.what());
    }
}

}  // namespace latentprobe
