#pragma once

#include <memory>

#include <nlohmann/json.hpp>

#include "latentprobe/backend.hpp"
#include "latentprobe/bridge.hpp"
#include "latentprobe/synthetic.hpp"

namespace latentprobe {

// Backend specs:
//   {"type":"synthetic","D":64,"m":32,"k":16,"seed":42}
//   {"type":"bridge","transport":"stdio","command":["server","--flag"],
//    "timeout_ms":30000,"max_batch":256}
//   {"type":"bridge","transport":"tcp","address":"127.0.0.1:9000"}

SyntheticParams synthetic_params_from_json(const nlohmann::json& spec);
BridgeConfig bridge_config_from_json(const nlohmann::json& spec);

std::unique_ptr<Backend> make_backend(const nlohmann::json& spec);

}  // namespace latentprobe
