#include "latentprobe/factory.hpp"

#include <string>

namespace latentprobe {

namespace {

constexpr const char* kModule = "cli";

template <class T>
T get_or(const nlohmann::json& spec, const char* key, T fallback) {
    if (!spec.contains(key)) return fallback;
    try {
        return spec.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(kModule, std::string("backend field \"") + key + "\": " + e.what());
    }
}

}  // namespace

SyntheticParams synthetic_params_from_json(const nlohmann::json& spec) {
    SyntheticParams p;
    p.latent_dim = get_or(spec, "D", p.latent_dim);
    p.embedding_dim = get_or(spec, "m", p.embedding_dim);
    p.attribute_dim = get_or(spec, "k", p.attribute_dim);
    p.seed = get_or(spec, "seed", p.seed);
    p.validate();
    return p;
}

BridgeConfig bridge_config_from_json(const nlohmann::json& spec) {
    BridgeConfig c;
    const auto transport = get_or<std::string>(spec, "transport", "stdio");
    if (transport == "stdio") {
        c.transport = TransportKind::stdio_subprocess;
        c.command = get_or<std::vector<std::string>>(spec, "command", {});
    } else if (transport == "tcp") {
        c.transport = TransportKind::tcp;
        c.address = get_or<std::string>(spec, "address", "");
    } else {
        throw ConfigError(kModule, "unknown bridge transport \"" + transport + "\"");
    }
    c.timeout = std::chrono::milliseconds(get_or<long>(spec, "timeout_ms", 30000));
    c.max_batch = get_or<std::size_t>(spec, "max_batch", 256);
    c.validate();
    return c;
}

std::unique_ptr<Backend> make_backend(const nlohmann::json& spec) {
    if (!spec.is_object() || !spec.contains("type")) {
        throw ConfigError(kModule, "backend spec needs a \"type\" field");
    }
    const auto type = spec.at("type").get<std::string>();
    if (type == "synthetic") {
        return std::make_unique<SyntheticBackend>(synthetic_params_from_json(spec));
    }
    if (type == "bridge") {
        return std::make_unique<BridgeBackend>(bridge_config_from_json(spec));
    }
    throw ConfigError(kModule, "unknown backend type \"" + type + "\"");
}

}  // namespace latentprobe
