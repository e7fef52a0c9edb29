#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "latentprobe/error.hpp"

namespace latentprobe {

/// Fixed-length vector of finite reals. The tag distinguishes latent inputs
/// from identity embeddings so the two cannot be mixed up at call sites.
template <class Tag>
class RealVector {
public:
    RealVector() = default;

    explicit RealVector(std::vector<double> values) : values_(std::move(values)) {
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (!std::isfinite(values_[i])) {
                throw ConfigError(Tag::module, std::string(Tag::name) + " has non-finite value at index " +
                                                   std::to_string(i));
            }
        }
    }

    RealVector(std::initializer_list<double> values) : RealVector(std::vector<double>(values)) {}

    static RealVector zeros(std::size_t n) { return RealVector(std::vector<double>(n, 0.0)); }

    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }
    double operator[](std::size_t i) const { return values_[i]; }

    std::span<const double> span() const noexcept { return values_; }
    const std::vector<double>& values() const noexcept { return values_; }

    auto begin() const noexcept { return values_.begin(); }
    auto end() const noexcept { return values_.end(); }

    friend bool operator==(const RealVector&, const RealVector&) = default;

private:
    std::vector<double> values_;
};

struct LatentTag {
    static constexpr const char* module = "latent-core";
    static constexpr const char* name = "latent vector";
};

struct EmbeddingTag {
    static constexpr const char* module = "backend-api";
    static constexpr const char* name = "embedding";
};

/// Generator input z. Values are never clipped; magnitudes outside [-1, 1]
/// are legitimate.
using LatentVector = RealVector<LatentTag>;

/// Point in identity space; squared L2 between embeddings measures identity similarity.
using Embedding = RealVector<EmbeddingTag>;

}  // namespace latentprobe
