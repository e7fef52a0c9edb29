#include <cstdlib>
#include <string>

#include <spdlog/spdlog.h>

#include "kernels_internal.hpp"
#include "latentprobe/error.hpp"

namespace latentprobe::simd {

namespace {

bool cpu_supports(Isa isa) {
    switch (isa) {
        case Isa::scalar:
            return true;
        case Isa::avx2:
#if defined(LATENTPROBE_HAVE_AVX2)
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Isa::neon:
#if defined(LATENTPROBE_HAVE_NEON)
            return true;  // baseline on aarch64
#else
            return false;
#endif
    }
    return false;
}

Isa parse_isa(const std::string& text) {
    if (text == "scalar") return Isa::scalar;
    if (text == "avx2") return Isa::avx2;
    if (text == "neon") return Isa::neon;
    throw ConfigError("kernels", "unknown LATENTPROBE_SIMD value \"" + text + "\"");
}

const KernelTable& select_kernels() {
    if (const char* forced = std::getenv("LATENTPROBE_SIMD"); forced != nullptr && *forced != '\0') {
        return kernels_for(parse_isa(forced));
    }
    const auto isas = available_isas();
    const auto& table = kernels_for(isas.back());
    spdlog::debug("simd kernels: {}", to_string(table.isa));
    return table;
}

}  // namespace

std::string_view to_string(Isa isa) {
    switch (isa) {
        case Isa::scalar:
            return "scalar";
        case Isa::avx2:
            return "avx2";
        case Isa::neon:
            return "neon";
    }
    return "unknown";
}

std::vector<Isa> available_isas() {
    std::vector<Isa> out;
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
        if (cpu_supports(isa)) {
            out.push_back(isa);
        }
    }
    return out;
}

const KernelTable& kernels_for(Isa isa) {
    if (!cpu_supports(isa)) {
        throw ConfigError("kernels", std::string(to_string(isa)) + " kernels are not available on this machine");
    }
    switch (isa) {
#if defined(LATENTPROBE_HAVE_AVX2)
        case Isa::avx2:
            return detail::avx2_kernels();
#endif
#if defined(LATENTPROBE_HAVE_NEON)
        case Isa::neon:
            return detail::neon_kernels();
#endif
        default:
            return scalar_kernels();
    }
}

const KernelTable& active_kernels() {
    static const KernelTable& table = select_kernels();
    return table;
}

}  // namespace latentprobe::simd
