#include "latentprobe/rng.hpp"

#include <algorithm>

namespace latentprobe {

namespace {

std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

std::uint64_t mix(std::uint64_t x) noexcept { return SplitMix64(x).next(); }

}  // namespace

SeededRng::SeededRng(std::uint64_t seed) : seed_(seed) {
    SplitMix64 sm(seed);
    for (auto& word : s_) {
        word = sm.next();
    }
    // splitmix64 never yields four zero words from one state, but guard anyway
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) {
        s_[0] = 1;
    }
}

SeededRng SeededRng::substream(std::uint64_t master_seed, std::uint64_t stream_id) {
    return SeededRng(mix(master_seed ^ mix(stream_id + 0xD1B54A32D192ED03ULL)));
}

std::uint64_t SeededRng::next_u64() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double SeededRng::uniform(double lower, double upper) noexcept {
    const double u = next_unit();
    // rounding in lower + width*u can land a hair outside the interval
    return std::clamp(lower + (upper - lower) * u, lower, upper);
}

}  // namespace latentprobe
