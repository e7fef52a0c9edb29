#include "latentprobe/kernels.hpp"

namespace latentprobe::simd {

namespace {

// Reference kernels: strictly sequential accumulation.

double squared_l2_scalar(const double* a, const double* b, std::size_t n) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sum += a[i] * b[i];
    }
    return sum;
}

void matvec_scalar(const double* m, std::size_t rows, std::size_t cols, const double* x, double* out) {
    for (std::size_t r = 0; r < rows; ++r) {
        out[r] = dot_scalar(m + r * cols, x, cols);
    }
}

}  // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{Isa::scalar, &squared_l2_scalar, &dot_scalar, &matvec_scalar};
    return table;
}

}  // namespace latentprobe::simd
