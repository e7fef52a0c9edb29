#include "latentprobe/probe.hpp"

#include <algorithm>

#include "latentprobe/latent.hpp"
#include "latentprobe/rng.hpp"

namespace latentprobe {

namespace {

constexpr const char* kModule = "synthetic-backend";

Embedding pipeline(Backend& backend, const LatentVector& z) { return backend.embed(backend.generate(z)); }

}  // namespace

std::string_view to_string(ProbeKind kind) {
    switch (kind) {
        case ProbeKind::noise:
            return "noise";
        case ProbeKind::sign:
            return "sign";
        case ProbeKind::scale:
            return "scale";
    }
    return "unknown";
}

double property_probe(Backend& backend, const LatentVector& z, ProbeKind kind, const ProbeParams& params) {
    const Embedding reference = pipeline(backend, z);
    switch (kind) {
        case ProbeKind::sign:
            return distance(reference, pipeline(backend, sign(z)));
        case ProbeKind::scale:
            if (!(params.factor > 0.0)) {
                throw ConfigError(kModule, "scale probe needs a positive factor");
            }
            return distance(reference, pipeline(backend, scaled(z, params.factor)));
        case ProbeKind::noise: {
            if (params.amplitude < 0.0) {
                throw ConfigError(kModule, "noise probe amplitude must be >= 0");
            }
            if (params.trials == 0) {
                throw ConfigError(kModule, "noise probe needs at least one trial");
            }
            SeededRng rng(params.seed);
            std::vector<double> perturbed(z.size());
            double worst = 0.0;
            for (std::size_t t = 0; t < params.trials; ++t) {
                for (std::size_t i = 0; i < z.size(); ++i) {
                    perturbed[i] = z[i] + rng.uniform(-params.amplitude, params.amplitude);
                }
                worst = std::max(worst, distance(reference, pipeline(backend, LatentVector(perturbed))));
            }
            return worst;
        }
    }
    throw ConfigError(kModule, "unknown probe kind");
}

LatentVector margin_latent(std::size_t dim, double margin, std::uint64_t seed) {
    if (margin < 0.0 || margin > 1.0) {
        throw ConfigError(kModule, "margin must lie in [0, 1]");
    }
    SeededRng rng(seed);
    std::vector<double> values(dim);
    for (auto& v : values) {
        const double magnitude = rng.uniform(margin, 1.0);
        v = rng.next_unit() < 0.5 ? -magnitude : magnitude;
    }
    return LatentVector(std::move(values));
}

}  // namespace latentprobe
