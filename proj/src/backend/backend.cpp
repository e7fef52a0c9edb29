#include "latentprobe/backend.hpp"

#include <algorithm>
#include <exception>
#include <limits>
#include <thread>

#include "latentprobe/kernels.hpp"

namespace latentprobe {

namespace {

constexpr const char* kModule = "backend-api";

[[noreturn]] void rethrow_with_index(std::size_t index) {
    const std::string prefix = "item " + std::to_string(index) + ": ";
    try {
        throw;
    } catch (const DimensionError& e) {
        throw DimensionError(e.module(), prefix + e.what());
    } catch (const Error& e) {
        throw BackendError(e.module(), prefix + e.what());
    } catch (const std::exception& e) {
        throw BackendError(kModule, prefix + e.what());
    }
}

}  // namespace

std::string to_string(const ImageShape& shape) {
    return "(" + std::to_string(shape[0]) + "," + std::to_string(shape[1]) + "," + std::to_string(shape[2]) + ")";
}

ImageTensor::ImageTensor(ImageShape shape, std::vector<double> values) : shape_(shape), values_(std::move(values)) {
    if (values_.size() != element_count(shape_)) {
        throw DimensionError(kModule, "image tensor has " + std::to_string(values_.size()) +
                                          " values but shape " + to_string(shape_));
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw ConfigError(kModule, "image tensor has non-finite value at index " + std::to_string(i));
        }
    }
}

void BackendInfo::validate() const {
    if (latent_dim == 0) throw ConfigError(kModule, "backend latent_dim must be >= 1");
    if (embedding_dim == 0) throw ConfigError(kModule, "backend embedding_dim must be >= 1");
    if (element_count(image_shape) == 0) {
        throw ConfigError(kModule, "backend image_shape " + to_string(image_shape) + " has a zero extent");
    }
}

std::vector<Embedding> Backend::generate_embed(std::span<const LatentVector> zs) {
    std::vector<Embedding> out;
    out.reserve(zs.size());
    for (const auto& z : zs) {
        out.push_back(embed(generate(z)));
    }
    return out;
}

void Backend::check_latent(const LatentVector& z) const {
    if (z.size() != info().latent_dim) {
        throw DimensionError(kModule, "latent has length " + std::to_string(z.size()) + ", backend expects " +
                                          std::to_string(info().latent_dim));
    }
}

void Backend::check_image(const ImageTensor& x) const {
    if (x.shape() != info().image_shape) {
        throw DimensionError(kModule, "image shape " + to_string(x.shape()) + " does not match backend shape " +
                                          to_string(info().image_shape));
    }
}

ImageTensor CountingBackend::generate(const LatentVector& z) {
    ++latents_;
    return inner_.generate(z);
}

Embedding CountingBackend::embed(const ImageTensor& x) {
    ++embeds_;
    return inner_.embed(x);
}

std::vector<Embedding> CountingBackend::generate_embed(std::span<const LatentVector> zs) {
    latents_ += zs.size();
    return inner_.generate_embed(zs);
}

TargetIdentity::TargetIdentity(std::vector<Embedding> embeddings, TargetReduction reduction)
    : embeddings_(std::move(embeddings)), reduction_(reduction) {
    if (embeddings_.empty()) {
        throw ConfigError(kModule, "target identity needs at least one embedding");
    }
    for (std::size_t k = 1; k < embeddings_.size(); ++k) {
        if (embeddings_[k].size() != embeddings_.front().size()) {
            throw DimensionError(kModule, "target embedding " + std::to_string(k) + " has length " +
                                              std::to_string(embeddings_[k].size()) + ", expected " +
                                              std::to_string(embeddings_.front().size()));
        }
    }
}

double distance(const Embedding& a, const Embedding& b) {
    if (a.size() != b.size()) {
        throw DimensionError(kModule, "distance between embeddings of length " + std::to_string(a.size()) +
                                          " and " + std::to_string(b.size()));
    }
    return simd::squared_l2(a.span(), b.span());
}

double identity_score(const Embedding& e, const TargetIdentity& target) {
    const auto& ts = target.embeddings();
    if (target.reduction() == TargetReduction::min) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& t : ts) {
            best = std::min(best, distance(e, t));
        }
        return best;
    }
    double sum = 0.0;
    for (const auto& t : ts) {
        sum += distance(e, t);
    }
    return sum / static_cast<double>(ts.size());
}

std::vector<double> score_batch(std::span<const LatentVector> zs, const TargetIdentity& target, Backend& backend,
                                const BatchOptions& options) {
    const auto& info = backend.info();
    for (std::size_t i = 0; i < zs.size(); ++i) {
        if (zs[i].size() != info.latent_dim) {
            throw DimensionError(kModule, "item " + std::to_string(i) + ": latent has length " +
                                              std::to_string(zs[i].size()) + ", backend expects " +
                                              std::to_string(info.latent_dim));
        }
    }
    std::vector<double> scores(zs.size());

    // Scores [begin, end) into `scores`; each slot is written by exactly one worker.
    auto evaluate = [&](std::size_t begin, std::size_t end) {
        if (info.supports_fused_generate_embed) {
            const auto embeddings = backend.generate_embed(zs.subspan(begin, end - begin));
            if (embeddings.size() != end - begin) {
                throw BackendError(kModule, "fused call returned " + std::to_string(embeddings.size()) +
                                                " embeddings for " + std::to_string(end - begin) + " latents");
            }
            for (std::size_t i = begin; i < end; ++i) {
                scores[i] = identity_score(embeddings[i - begin], target);
            }
            return;
        }
        for (std::size_t i = begin; i < end; ++i) {
            try {
                scores[i] = identity_score(backend.embed(backend.generate(zs[i])), target);
            } catch (...) {
                rethrow_with_index(i);
            }
        }
    };

    const std::size_t workers =
        info.concurrent_calls ? std::min(std::max<std::size_t>(options.threads, 1), zs.size()) : 1;
    if (workers <= 1) {
        evaluate(0, zs.size());
        return scores;
    }

    std::vector<std::exception_ptr> failures(workers);
    {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (zs.size() + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(zs.size(), begin + chunk);
            if (begin >= end) break;
            pool.emplace_back([&, w, begin, end] {
                try {
                    evaluate(begin, end);
                } catch (...) {
                    failures[w] = std::current_exception();
                }
            });
        }
    }
    // lowest failing chunk wins so the reported error does not depend on scheduling
    for (const auto& failure : failures) {
        if (failure) std::rethrow_exception(failure);
    }
    return scores;
}

}  // namespace latentprobe
