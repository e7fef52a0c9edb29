#include "mock_server_core.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "latentprobe/bridge.hpp"

namespace latentprobe::testing {

using nlohmann::json;

MockServer::MockServer(MockOptions options) : options_(options), backend_(options.params) {}

std::vector<std::string> MockServer::handle(const std::string& line) {
    ++requests_;
    if (requests_ <= options_.drop_requests) {
        return {};
    }
    if (options_.garbage) {
        return {"this is not json"};
    }
    json request;
    try {
        request = json::parse(line);
    } catch (const json::parse_error&) {
        return {json{{"id", nullptr}, {"ok", false}, {"error", "malformed request"}}.dump()};
    }
    json reply{{"id", request.value("id", 0L) + (options_.wrong_id ? 1000 : 0)}, {"ok", true}};
    const std::string op = request.value("op", std::string());
    const auto& info = backend_.info();
    try {
        if (op == "info") {
            if (!options_.omit_latent_dim) reply["latent_dim"] = info.latent_dim;
            reply["embedding_dim"] = info.embedding_dim;
            reply["image_shape"] = info.image_shape;
            reply["name"] = "mock-synthetic";
            reply["fused"] = options_.fused;
        } else if (op == "generate_embed") {
            const auto rows = request.at("latents").get<std::vector<std::vector<double>>>();
            batch_sizes_.push_back(rows.size());
            if (options_.fail_index >= 0 && static_cast<std::size_t>(options_.fail_index) < rows.size()) {
                return {json{{"id", reply["id"]}, {"ok", false}, {"error", "forced failure"},
                             {"index", options_.fail_index}}
                            .dump()};
            }
            std::vector<LatentVector> zs;
            for (const auto& r : rows) zs.emplace_back(r);
            const auto es = backend_.generate_embed(zs);
            std::vector<std::size_t> order(es.size());
            for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
            if (options_.shuffle) std::reverse(order.begin(), order.end());
            reply["embeddings"] = json::array();
            for (auto idx : order) reply["embeddings"].push_back(es[idx].values());
            if (options_.shuffle) reply["indices"] = order;
        } else if (op == "generate") {
            const auto x = backend_.generate(LatentVector(request.at("latent").get<std::vector<double>>()));
            reply["shape"] = x.shape();
            reply["data_b64"] = encode_tensor_payload(x.values());
        } else if (op == "embed") {
            const auto dims = request.at("shape").get<std::vector<std::size_t>>();
            if (dims.size() != 3) throw std::runtime_error("shape must have three extents");
            const ImageShape shape{dims[0], dims[1], dims[2]};
            const auto values = decode_tensor_payload(request.at("data_b64").get<std::string>(), element_count(shape));
            reply["embedding"] = backend_.embed(ImageTensor(shape, values)).values();
        } else {
            reply["ok"] = false;
            reply["error"] = "unknown op \"" + op + "\"";
        }
    } catch (const std::exception& e) {
        reply = json{{"id", reply["id"]}, {"ok", false}, {"error", e.what()}};
    }
    return {reply.dump()};
}

}  // namespace latentprobe::testing
