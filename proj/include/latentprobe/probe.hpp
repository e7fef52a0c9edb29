#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "latentprobe/backend.hpp"

namespace latentprobe {

// Diagnostic probes for the three latent-space invariances the search relies
// on: small-noise robustness, sign invariance and scale invariance. They work
// against any backend; on the synthetic backend they are exact.

enum class ProbeKind { noise, sign, scale };

std::string_view to_string(ProbeKind kind);

struct ProbeParams {
    double amplitude = 0.5;    // noise: u ~ U[-amplitude, amplitude]^D
    std::size_t trials = 100;  // noise
    double factor = 2.0;       // scale: c > 0
    std::uint64_t seed = 0;    // noise draws
};

/// Max observed distance between embed(generate(z)) and the embedding of the
/// perturbed latent.
double property_probe(Backend& backend, const LatentVector& z, ProbeKind kind,
                      const ProbeParams& params = {});

/// Random latent with every |z_i| in [margin, 1] and random signs.
LatentVector margin_latent(std::size_t dim, double margin, std::uint64_t seed);

}  // namespace latentprobe
