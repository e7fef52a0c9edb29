#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace latentprobe::simd {

enum class Isa { scalar, avx2, neon };

std::string_view to_string(Isa isa);

/// One implementation of every data-parallel inner loop. All variants must
/// agree with the scalar reference to within reassociation error.
struct KernelTable {
    Isa isa;
    double (*squared_l2)(const double* a, const double* b, std::size_t n);
    double (*dot)(const double* a, const double* b, std::size_t n);
    // out[r] = sum_c m[r*cols + c] * x[c]
    void (*matvec)(const double* m, std::size_t rows, std::size_t cols, const double* x, double* out);
};

const KernelTable& scalar_kernels();

/// Kernels compiled into this binary and supported by the running CPU.
std::vector<Isa> available_isas();

/// Throws ConfigError if the ISA is not available on this machine.
const KernelTable& kernels_for(Isa isa);

/// Best available ISA, chosen once. LATENTPROBE_SIMD=scalar|avx2|neon overrides.
const KernelTable& active_kernels();

inline double squared_l2(std::span<const double> a, std::span<const double> b) {
    return active_kernels().squared_l2(a.data(), b.data(), a.size());
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    return active_kernels().dot(a.data(), b.data(), a.size());
}

}  // namespace latentprobe::simd
