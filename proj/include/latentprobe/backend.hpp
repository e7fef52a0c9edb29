#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "latentprobe/vector.hpp"

namespace latentprobe {

/// (channels, height, width)
using ImageShape = std::array<std::size_t, 3>;

inline std::size_t element_count(const ImageShape& shape) { return shape[0] * shape[1] * shape[2]; }

std::string to_string(const ImageShape& shape);

/// Generator output, planar channel-major, normalized intensities.
class ImageTensor {
public:
    ImageTensor() = default;
    /// Throws DimensionError on a size/shape mismatch and ConfigError on non-finite values.
    ImageTensor(ImageShape shape, std::vector<double> values);

    const ImageShape& shape() const noexcept { return shape_; }
    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }

    friend bool operator==(const ImageTensor&, const ImageTensor&) = default;

private:
    ImageShape shape_{0, 0, 0};
    std::vector<double> values_;
};

struct BackendInfo {
    std::size_t latent_dim = 0;
    std::size_t embedding_dim = 0;
    ImageShape image_shape{0, 0, 0};
    std::string backend_name;
    bool supports_fused_generate_embed = false;
    // Whether generate/embed may be called from several threads at once.
    bool concurrent_calls = false;
    // Free-form description of how the image values were produced (e.g. the
    // synthetic backend's squash map).
    std::string output_map;

    void validate() const;
};

/// Generator + embedder pair. Implementations must be deterministic.
class Backend {
public:
    virtual ~Backend() = default;

    virtual const BackendInfo& info() const = 0;
    virtual ImageTensor generate(const LatentVector& z) = 0;
    virtual Embedding embed(const ImageTensor& x) = 0;

    /// Fused path; the default falls back to embed(generate(z)) per item.
    virtual std::vector<Embedding> generate_embed(std::span<const LatentVector> zs);

protected:
    void check_latent(const LatentVector& z) const;
    void check_image(const ImageTensor& x) const;
};

/// Decorator counting generate/embed/generate_embed item evaluations. Used to
/// audit search budgets independently of the trace.
class CountingBackend : public Backend {
public:
    explicit CountingBackend(Backend& inner) : inner_(inner) {}

    const BackendInfo& info() const override { return inner_.info(); }
    ImageTensor generate(const LatentVector& z) override;
    Embedding embed(const ImageTensor& x) override;
    std::vector<Embedding> generate_embed(std::span<const LatentVector> zs) override;

    /// Number of latents pushed through the generator (fused or not).
    std::size_t latents_evaluated() const noexcept { return latents_; }
    std::size_t embed_calls() const noexcept { return embeds_; }

private:
    Backend& inner_;
    std::size_t latents_ = 0;
    std::size_t embeds_ = 0;
};

enum class TargetReduction { mean, min };

/// Embeddings of one or more reference images of the same person.
class TargetIdentity {
public:
    /// Throws ConfigError if empty, DimensionError if dimensions differ.
    explicit TargetIdentity(std::vector<Embedding> embeddings,
                            TargetReduction reduction = TargetReduction::mean);

    const std::vector<Embedding>& embeddings() const noexcept { return embeddings_; }
    std::size_t dim() const noexcept { return embeddings_.front().size(); }
    TargetReduction reduction() const noexcept { return reduction_; }

private:
    std::vector<Embedding> embeddings_;
    TargetReduction reduction_;
};

/// Squared L2 distance, accumulated in double.
double distance(const Embedding& a, const Embedding& b);

/// Mean (or, if configured, min) of distance(e, t) over the target set.
double identity_score(const Embedding& e, const TargetIdentity& target);

struct BatchOptions {
    // Worker threads for the unfused path; only honored when the backend
    // declares concurrent_calls.
    std::size_t threads = 1;
};

/// result[i] == identity_score(embed(generate(zs[i])), target), in input order.
std::vector<double> score_batch(std::span<const LatentVector> zs, const TargetIdentity& target,
                                Backend& backend, const BatchOptions& options = {});

}  // namespace latentprobe
