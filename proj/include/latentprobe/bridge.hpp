#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "latentprobe/backend.hpp"

namespace latentprobe {

// Wire protocol v1: newline-delimited UTF-8 JSON, one request in flight per
// connection.
//
//   {"id":1,"op":"info"}
//   {"id":2,"op":"generate_embed","latents":[[f32...],...]}
//   {"id":3,"op":"generate","latent":[...]}
//   {"id":4,"op":"embed","shape":[c,h,w],"data_b64":"..."}
//
// Replies echo "id" and carry "ok". A generate_embed reply may include an
// "indices" array giving the input index of each returned embedding; the
// client restores input order from it. Error replies may carry an "index"
// naming the failing batch item.

enum class TransportKind { stdio_subprocess, tcp };

struct BridgeConfig {
    TransportKind transport = TransportKind::stdio_subprocess;
    std::vector<std::string> command;  // stdio: argv of the server
    std::string address;               // tcp: "host:port"
    std::chrono::milliseconds timeout{30000};
    std::size_t max_batch = 256;

    void validate() const;
};

/// Byte stream carrying newline-delimited messages.
class Transport {
public:
    virtual ~Transport() = default;
    /// Writes one message followed by '\n'. Throws TransportError.
    virtual void send_line(std::string_view line) = 0;
    /// Next message without its '\n'. Throws TransportError on EOF or timeout.
    virtual std::string receive_line(std::chrono::milliseconds timeout) = 0;
    /// Drops the current connection and opens a fresh one.
    virtual void reconnect() = 0;
};

/// Spawns the server with its stdin/stdout as the message stream.
std::unique_ptr<Transport> make_subprocess_transport(std::vector<std::string> command);
std::unique_ptr<Transport> make_tcp_transport(const std::string& address);
std::unique_ptr<Transport> make_transport(const BridgeConfig& config);

/// In-process transport driven by a handler; each request line yields zero
/// or more reply lines. Used for protocol conformance tests.
class ScriptedTransport : public Transport {
public:
    using Handler = std::function<std::vector<std::string>(const std::string& request)>;

    explicit ScriptedTransport(Handler handler) : handler_(std::move(handler)) {}

    void send_line(std::string_view line) override;
    std::string receive_line(std::chrono::milliseconds timeout) override;
    void reconnect() override;

    std::size_t requests_seen() const noexcept { return requests_; }
    std::size_t reconnects() const noexcept { return reconnects_; }

private:
    Handler handler_;
    std::vector<std::string> pending_;
    std::size_t next_ = 0;
    std::size_t requests_ = 0;
    std::size_t reconnects_ = 0;
};

/// Protocol client. Lockstep: each call sends one request and waits for its reply.
class BridgeClient {
public:
    BridgeClient(std::unique_ptr<Transport> transport, BridgeConfig config);

    BackendInfo handshake();
    /// Splits into ceil(n / max_batch) requests; output order == input order.
    std::vector<Embedding> generate_embed(std::span<const LatentVector> zs);
    ImageTensor generate(const LatentVector& z);
    Embedding embed(const ImageTensor& x);

    const BridgeConfig& config() const noexcept { return config_; }
    std::size_t requests_sent() const noexcept { return requests_; }

private:
    nlohmann::json request(nlohmann::json message);
    nlohmann::json exchange(const nlohmann::json& message, std::int64_t id);
    std::vector<Embedding> generate_embed_chunk(std::span<const LatentVector> zs, std::size_t offset);

    std::unique_ptr<Transport> transport_;
    BridgeConfig config_;
    std::int64_t next_id_ = 1;
    std::size_t requests_ = 0;
    std::optional<BackendInfo> info_;
};

/// Backend served by a remote model server.
class BridgeBackend : public Backend {
public:
    /// Performs the handshake.
    BridgeBackend(std::unique_ptr<Transport> transport, BridgeConfig config);
    explicit BridgeBackend(const BridgeConfig& config);

    const BackendInfo& info() const override { return info_; }
    ImageTensor generate(const LatentVector& z) override;
    Embedding embed(const ImageTensor& x) override;
    std::vector<Embedding> generate_embed(std::span<const LatentVector> zs) override;

    BridgeClient& client() noexcept { return client_; }

private:
    BridgeClient client_;
    BackendInfo info_;
};

std::string base64_encode(std::span<const std::uint8_t> bytes);
/// Throws FormatError on invalid input.
std::vector<std::uint8_t> base64_decode(std::string_view text);

/// Little-endian f32 payload of a tensor, base64 encoded.
std::string encode_tensor_payload(std::span<const double> values);
std::vector<double> decode_tensor_payload(std::string_view b64, std::size_t expected_count);

}  // namespace latentprobe
