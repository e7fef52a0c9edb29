#include "latentprobe/latent.hpp"

#include <string>

namespace latentprobe {

namespace {

constexpr const char* kModule = "latent-core";

void require_same_length(const LatentVector& a, const LatentVector& b, const char* what) {
    if (a.size() != b.size()) {
        throw ConfigError(kModule, std::string(what) + ": length mismatch (" + std::to_string(a.size()) +
                                       " vs " + std::to_string(b.size()) + ")");
    }
}

}  // namespace

SamplingBox::SamplingBox(LatentVector lower, LatentVector upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
    require_same_length(lower_, upper_, "sampling box");
    for (std::size_t i = 0; i < lower_.size(); ++i) {
        if (lower_[i] > upper_[i]) {
            throw ConfigError(kModule, "sampling box has lower > upper at coordinate " + std::to_string(i));
        }
    }
}

SamplingBox SamplingBox::unit(std::size_t dim) { return SamplingBox(filled(dim, -1.0), filled(dim, 1.0)); }

bool SamplingBox::contains(const LatentVector& z) const {
    if (z.size() != dim()) {
        return false;
    }
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (z[i] < lower_[i] || z[i] > upper_[i]) {
            return false;
        }
    }
    return true;
}

std::vector<LatentVector> sample_box(const SamplingBox& box, std::size_t n, SeededRng& rng) {
    if (n == 0) {
        throw ConfigError(kModule, "sample_box requires n >= 1");
    }
    std::vector<LatentVector> out;
    out.reserve(n);
    const auto& lo = box.lower();
    const auto& hi = box.upper();
    std::vector<double> values(box.dim());
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            values[i] = rng.uniform(lo[i], hi[i]);
        }
        out.emplace_back(values);
    }
    return out;
}

SamplingBox shift_box(const LatentVector& base_lower, const LatentVector& base_upper, const LatentVector& anchor,
                      double scale) {
    require_same_length(base_lower, base_upper, "shift_box");
    require_same_length(base_lower, anchor, "shift_box");
    std::vector<double> lo(anchor.size());
    std::vector<double> hi(anchor.size());
    for (std::size_t i = 0; i < anchor.size(); ++i) {
        lo[i] = base_lower[i] + scale * anchor[i];
        hi[i] = base_upper[i] + scale * anchor[i];
    }
    return SamplingBox(LatentVector(std::move(lo)), LatentVector(std::move(hi)));
}

SamplingBox noise_box(const LatentVector& anchor_neg, const LatentVector& anchor_pos, const LatentVector& unit,
                      double scale) {
    require_same_length(anchor_neg, anchor_pos, "noise_box");
    require_same_length(anchor_neg, unit, "noise_box");
    std::vector<double> lo(unit.size());
    std::vector<double> hi(unit.size());
    for (std::size_t i = 0; i < unit.size(); ++i) {
        lo[i] = anchor_neg[i] + scale * unit[i];
        hi[i] = anchor_pos[i] + scale * unit[i];
        if (lo[i] > hi[i]) {
            std::swap(lo[i], hi[i]);
        }
    }
    return SamplingBox(LatentVector(std::move(lo)), LatentVector(std::move(hi)));
}

LatentVector sign(const LatentVector& z) {
    std::vector<double> out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        out[i] = z[i] > 0.0 ? 1.0 : (z[i] < 0.0 ? -1.0 : 0.0);
    }
    return LatentVector(std::move(out));
}

LatentVector scaled(const LatentVector& z, double factor) {
    std::vector<double> out(z.begin(), z.end());
    for (auto& v : out) {
        v *= factor;
    }
    return LatentVector(std::move(out));
}

LatentVector negated(const LatentVector& z) { return scaled(z, -1.0); }

LatentVector filled(std::size_t dim, double value) { return LatentVector(std::vector<double>(dim, value)); }

}  // namespace latentprobe
