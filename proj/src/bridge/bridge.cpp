#include "latentprobe/bridge.hpp"

#include <algorithm>

#include <spdlog/spdlog.h>

namespace latentprobe {

namespace {

constexpr const char* kModule = "model-bridge";

using nlohmann::json;

const json& require_field(const json& reply, const char* field) {
    if (!reply.contains(field)) {
        throw ProtocolError(kModule, std::string("reply is missing field \"") + field + "\"");
    }
    return reply.at(field);
}

template <class T>
T field_as(const json& reply, const char* field) {
    try {
        return require_field(reply, field).get<T>();
    } catch (const json::exception& e) {
        throw ProtocolError(kModule, std::string("reply field \"") + field + "\" has the wrong type: " + e.what());
    }
}

ImageShape shape_from(const json& value) {
    const auto dims = value.get<std::vector<std::size_t>>();
    if (dims.size() != 3) {
        throw ProtocolError(kModule, "image shape must have three extents");
    }
    return {dims[0], dims[1], dims[2]};
}

json f32_array(const LatentVector& z) {
    auto out = json::array();
    for (double v : z) {
        out.push_back(static_cast<double>(static_cast<float>(v)));
    }
    return out;
}

}  // namespace

void BridgeConfig::validate() const {
    if (timeout.count() <= 0) throw ConfigError(kModule, "timeout must be > 0");
    if (max_batch == 0) throw ConfigError(kModule, "max batch size must be >= 1");
    if (transport == TransportKind::stdio_subprocess && command.empty()) {
        throw ConfigError(kModule, "stdio transport needs a command");
    }
    if (transport == TransportKind::tcp && address.empty()) {
        throw ConfigError(kModule, "tcp transport needs an address");
    }
}

std::unique_ptr<Transport> make_transport(const BridgeConfig& config) {
    config.validate();
    if (config.transport == TransportKind::tcp) {
        return make_tcp_transport(config.address);
    }
    return make_subprocess_transport(config.command);
}

void ScriptedTransport::send_line(std::string_view line) {
    ++requests_;
    for (auto& reply : handler_(std::string(line))) {
        pending_.push_back(std::move(reply));
    }
}

std::string ScriptedTransport::receive_line(std::chrono::milliseconds timeout) {
    if (next_ >= pending_.size()) {
        throw TransportError(kModule, "timed out after " + std::to_string(timeout.count()) + " ms");
    }
    return pending_[next_++];
}

void ScriptedTransport::reconnect() {
    ++reconnects_;
    pending_.clear();
    next_ = 0;
}

BridgeClient::BridgeClient(std::unique_ptr<Transport> transport, BridgeConfig config)
    : transport_(std::move(transport)), config_(std::move(config)) {
    if (!transport_) throw ConfigError(kModule, "bridge client needs a transport");
    if (config_.timeout.count() <= 0) throw ConfigError(kModule, "timeout must be > 0");
    if (config_.max_batch == 0) throw ConfigError(kModule, "max batch size must be >= 1");
}

json BridgeClient::exchange(const json& message, std::int64_t id) {
    transport_->send_line(message.dump());
    ++requests_;
    const std::string line = transport_->receive_line(config_.timeout);
    json reply;
    try {
        reply = json::parse(line);
    } catch (const json::parse_error& e) {
        throw ProtocolError(kModule, std::string("malformed reply: ") + e.what());
    }
    if (!reply.is_object()) {
        throw ProtocolError(kModule, "reply is not a JSON object");
    }
    const auto reply_id = field_as<std::int64_t>(reply, "id");
    if (reply_id != id) {
        throw ProtocolError(kModule, "reply id " + std::to_string(reply_id) + " does not match pending request " +
                                         std::to_string(id));
    }
    return reply;
}

json BridgeClient::request(json message) {
    const std::int64_t id = next_id_++;
    message["id"] = id;
    json reply;
    try {
        reply = exchange(message, id);
    } catch (const TransportError& first) {
        spdlog::warn("bridge request {} failed ({}), reconnecting once", id, first.what());
        transport_->reconnect();
        reply = exchange(message, id);
    }
    if (!field_as<bool>(reply, "ok")) {
        const std::string error = reply.contains("error") && reply.at("error").is_string()
                                      ? reply.at("error").get<std::string>()
                                      : std::string("unspecified server error");
        if (reply.contains("index") && reply.at("index").is_number_integer()) {
            throw BackendError(kModule, "server error on item " + std::to_string(reply.at("index").get<long>()) +
                                            ": " + error);
        }
        throw BackendError(kModule, "server error: " + error);
    }
    return reply;
}

BackendInfo BridgeClient::handshake() {
    const json reply = request(json{{"op", "info"}});
    BackendInfo info;
    info.latent_dim = field_as<std::size_t>(reply, "latent_dim");
    info.embedding_dim = field_as<std::size_t>(reply, "embedding_dim");
    try {
        info.image_shape = shape_from(require_field(reply, "image_shape"));
    } catch (const json::exception& e) {
        throw ProtocolError(kModule, std::string("reply field \"image_shape\": ") + e.what());
    }
    info.backend_name = reply.value("name", std::string("bridge"));
    info.supports_fused_generate_embed = reply.value("fused", false);
    info.concurrent_calls = false;
    try {
        info.validate();
    } catch (const ConfigError& e) {
        throw ProtocolError(kModule, std::string("invalid info reply: ") + e.what());
    }
    info_ = info;
    return info;
}

std::vector<Embedding> BridgeClient::generate_embed_chunk(std::span<const LatentVector> zs, std::size_t offset) {
    json message{{"op", "generate_embed"}, {"latents", json::array()}};
    for (const auto& z : zs) {
        message["latents"].push_back(f32_array(z));
    }
    json reply;
    try {
        reply = request(std::move(message));
    } catch (const BackendError& e) {
        throw BackendError(kModule, "batch starting at item " + std::to_string(offset) + ": " + e.what());
    }
    const auto rows = field_as<std::vector<std::vector<double>>>(reply, "embeddings");
    if (rows.size() != zs.size()) {
        throw ProtocolError(kModule, "generate_embed returned " + std::to_string(rows.size()) +
                                         " embeddings for " + std::to_string(zs.size()) + " latents");
    }
    std::vector<std::size_t> order(rows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    if (reply.contains("indices")) {
        order = field_as<std::vector<std::size_t>>(reply, "indices");
        std::vector<bool> seen(rows.size(), false);
        if (order.size() != rows.size()) {
            throw ProtocolError(kModule, "\"indices\" length does not match \"embeddings\"");
        }
        for (auto idx : order) {
            if (idx >= rows.size() || seen[idx]) {
                throw ProtocolError(kModule, "\"indices\" is not a permutation of the batch");
            }
            seen[idx] = true;
        }
    }
    std::vector<std::vector<double>> ordered(rows.size());
    for (std::size_t j = 0; j < rows.size(); ++j) {
        ordered[order[j]] = rows[j];
    }
    std::vector<Embedding> out;
    out.reserve(ordered.size());
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        if (info_ && ordered[i].size() != info_->embedding_dim) {
            throw ProtocolError(kModule, "embedding for item " + std::to_string(offset + i) + " has length " +
                                             std::to_string(ordered[i].size()) + ", expected " +
                                             std::to_string(info_->embedding_dim));
        }
        try {
            out.emplace_back(std::move(ordered[i]));
        } catch (const ConfigError& e) {
            throw ProtocolError(kModule, "item " + std::to_string(offset + i) + ": " + e.what());
        }
    }
    return out;
}

std::vector<Embedding> BridgeClient::generate_embed(std::span<const LatentVector> zs) {
    std::vector<Embedding> out;
    out.reserve(zs.size());
    for (std::size_t begin = 0; begin < zs.size(); begin += config_.max_batch) {
        const std::size_t n = std::min(config_.max_batch, zs.size() - begin);
        auto chunk = generate_embed_chunk(zs.subspan(begin, n), begin);
        std::move(chunk.begin(), chunk.end(), std::back_inserter(out));
    }
    return out;
}

ImageTensor BridgeClient::generate(const LatentVector& z) {
    const json reply = request(json{{"op", "generate"}, {"latent", f32_array(z)}});
    ImageShape shape{};
    try {
        shape = shape_from(require_field(reply, "shape"));
    } catch (const json::exception& e) {
        throw ProtocolError(kModule, std::string("reply field \"shape\": ") + e.what());
    }
    if (info_ && shape != info_->image_shape) {
        throw ProtocolError(kModule, "generated image shape " + to_string(shape) + " does not match advertised " +
                                         to_string(info_->image_shape));
    }
    try {
        return ImageTensor(shape, decode_tensor_payload(field_as<std::string>(reply, "data_b64"),
                                                        element_count(shape)));
    } catch (const FormatError& e) {
        throw ProtocolError(kModule, std::string("bad tensor payload: ") + e.what());
    }
}

Embedding BridgeClient::embed(const ImageTensor& x) {
    const auto& s = x.shape();
    const json reply = request(json{{"op", "embed"},
                                    {"shape", json::array({s[0], s[1], s[2]})},
                                    {"data_b64", encode_tensor_payload(x.values())}});
    auto values = field_as<std::vector<double>>(reply, "embedding");
    if (info_ && values.size() != info_->embedding_dim) {
        throw ProtocolError(kModule, "embedding has length " + std::to_string(values.size()) + ", expected " +
                                         std::to_string(info_->embedding_dim));
    }
    try {
        return Embedding(std::move(values));
    } catch (const ConfigError& e) {
        throw ProtocolError(kModule, e.what());
    }
}

BridgeBackend::BridgeBackend(std::unique_ptr<Transport> transport, BridgeConfig config)
    : client_(std::move(transport), std::move(config)), info_(client_.handshake()) {}

BridgeBackend::BridgeBackend(const BridgeConfig& config) : BridgeBackend(make_transport(config), config) {}

ImageTensor BridgeBackend::generate(const LatentVector& z) {
    check_latent(z);
    return client_.generate(z);
}

Embedding BridgeBackend::embed(const ImageTensor& x) {
    check_image(x);
    return client_.embed(x);
}

std::vector<Embedding> BridgeBackend::generate_embed(std::span<const LatentVector> zs) {
    for (const auto& z : zs) check_latent(z);
    if (!info_.supports_fused_generate_embed) {
        return Backend::generate_embed(zs);
    }
    return client_.generate_embed(zs);
}

}  // namespace latentprobe
