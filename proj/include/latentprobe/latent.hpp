#pragma once

#include <cstddef>
#include <vector>

#include "latentprobe/rng.hpp"
#include "latentprobe/vector.hpp"

namespace latentprobe {

/// Per-coordinate [lower, upper] interval for candidate sampling.
class SamplingBox {
public:
    /// Throws ConfigError if lengths differ or lower[i] > upper[i] anywhere.
    SamplingBox(LatentVector lower, LatentVector upper);

    /// [-1, 1]^dim
    static SamplingBox unit(std::size_t dim);

    const LatentVector& lower() const noexcept { return lower_; }
    const LatentVector& upper() const noexcept { return upper_; }
    std::size_t dim() const noexcept { return lower_.size(); }

    bool contains(const LatentVector& z) const;

private:
    LatentVector lower_;
    LatentVector upper_;
};

/// n i.i.d. uniform draws from the box, coordinate by coordinate in order.
std::vector<LatentVector> sample_box(const SamplingBox& box, std::size_t n, SeededRng& rng);

/// [base_lower + scale*anchor, base_upper + scale*anchor]
SamplingBox shift_box(const LatentVector& base_lower, const LatentVector& base_upper,
                      const LatentVector& anchor, double scale);

/// [anchor_neg + scale*unit, anchor_pos + scale*unit] with endpoints swapped on
/// coordinates where the raw lower bound exceeds the upper one.
SamplingBox noise_box(const LatentVector& anchor_neg, const LatentVector& anchor_pos,
                      const LatentVector& unit, double scale);

/// Coordinate-wise sign with sign(0) == 0.
LatentVector sign(const LatentVector& z);

LatentVector scaled(const LatentVector& z, double factor);
LatentVector negated(const LatentVector& z);
LatentVector filled(std::size_t dim, double value);

}  // namespace latentprobe
