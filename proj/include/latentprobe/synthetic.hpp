#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "latentprobe/backend.hpp"

namespace latentprobe {

struct SyntheticParams {
    std::size_t latent_dim = 64;     // D
    std::size_t embedding_dim = 32;  // m
    std::size_t attribute_dim = 16;  // k
    std::uint64_t seed = 42;

    void validate() const;
};

/// Toy generator/embedder whose identity is the sign pattern of the latent:
///
///   identity block  = A * sign(z)    (m values)
///   attribute block = B * z          (k values)
///
/// A (m x D) and B (k x D) are drawn row-major from SplitMix64(seed), A first,
/// each entry (2u - 1) / sqrt(D) with u the top 53 bits of a draw scaled to
/// [0, 1). Scale and small-noise invariance of the identity hold exactly.
///
/// The surrogate image is (1, 1, m + k). The identity block is squashed by
/// y = 1/2 + x / (2 sqrt(D)), which maps its whole range into [0, 1] since
/// |(A s)_r| <= sqrt(D). The attribute block is unbounded (latents are never
/// clipped) and uses y = 1/2 + x / (2 (sqrt(D) + |x|)), which stays in (0, 1).
class SyntheticModel {
public:
    explicit SyntheticModel(const SyntheticParams& params);

    const SyntheticParams& params() const noexcept { return params_; }
    const std::vector<double>& identity_matrix() const noexcept { return a_; }
    const std::vector<double>& attribute_matrix() const noexcept { return b_; }

    /// A * sign(z)
    std::vector<double> identity_block(const LatentVector& z) const;
    /// A * s for an explicit sign vector.
    std::vector<double> identity_of_signs(std::span<const double> signs) const;
    /// B * z
    std::vector<double> attribute_block(const LatentVector& z) const;

    double squash_identity(double x) const noexcept;
    double unsquash_identity(double y) const noexcept;
    double squash_attribute(double x) const noexcept;
    double unsquash_attribute(double y) const noexcept;

private:
    SyntheticParams params_;
    double radius_;
    std::vector<double> a_;
    std::vector<double> b_;
};

class SyntheticBackend : public Backend {
public:
    explicit SyntheticBackend(const SyntheticParams& params);

    const BackendInfo& info() const override { return info_; }
    ImageTensor generate(const LatentVector& z) override;
    Embedding embed(const ImageTensor& x) override;
    /// A * sign(z) directly, skipping the squash round trip.
    std::vector<Embedding> generate_embed(std::span<const LatentVector> zs) override;

    const SyntheticModel& model() const noexcept { return model_; }

    /// Pre-squash attribute block recovered from a generated tensor.
    std::vector<double> attribute_of(const ImageTensor& x) const;

private:
    SyntheticModel model_;
    BackendInfo info_;
};

}  // namespace latentprobe
