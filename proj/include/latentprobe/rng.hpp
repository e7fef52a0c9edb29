#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace latentprobe {

// SplitMix64, used for seeding and for deriving substream seeds.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() noexcept {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
};

/// Uniform in [0, 1) from the top 53 bits of a 64-bit draw.
inline double unit_double(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Seeded xoshiro256** stream. Identical (seed, substream) pairs produce
/// identical sequences on every platform; no std:: distributions are used.
class SeededRng {
public:
    static constexpr std::string_view algorithm = "xoshiro256**/splitmix64";

    explicit SeededRng(std::uint64_t seed);

    /// Independent stream derived from a master seed and a stream id.
    static SeededRng substream(std::uint64_t master_seed, std::uint64_t stream_id);

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next_u64() noexcept;

    /// Uniform in [0, 1).
    double next_unit() noexcept { return unit_double(next_u64()); }

    /// Uniform in [lower, upper]; lower == upper returns lower exactly.
    double uniform(double lower, double upper) noexcept;

private:
    std::uint64_t seed_;
    std::array<std::uint64_t, 4> s_{};
};

}  // namespace latentprobe
