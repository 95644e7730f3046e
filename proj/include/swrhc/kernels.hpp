#pragma once

// Data-parallel inner loops shared by the sparse, banded and trajectory
// code. Every kernel has a portable scalar reference; an AVX2/FMA variant is
// compiled when the toolchain supports it and selected at runtime.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace swrhc::kernels {

enum class Isa { scalar, avx2 };

struct KernelTable {
    Isa isa;
    /// sum_i x[i] * y[i]
    double (*dot)(const double* x, const double* y, std::size_t n);
    /// y[i] += a * x[i]
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    /// z[i] = a * x[i] + b * y[i]
    void (*lincomb)(double a, const double* x, double b, const double* y, double* z, std::size_t n);
    /// y = A x for a CSR matrix
    void (*csr_spmv)(std::size_t n_rows, const std::size_t* row_ptr, const std::uint32_t* cols,
                     const double* vals, const double* x, double* y);
};

const KernelTable& scalar_table();

/// Null when the AVX2 variant was not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2_table();

/// Kernels used by the library. Resolved once: the best supported ISA,
/// unless the environment variable SWRHC_ISA=scalar forces the reference.
const KernelTable& active();

std::string_view isa_name(Isa isa);

inline double dot(std::span<const double> x, std::span<const double> y) {
    return active().dot(x.data(), y.data(), x.size());
}

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
    active().axpy(a, x.data(), y.data(), x.size());
}

inline void lincomb(double a, std::span<const double> x, double b, std::span<const double> y,
                    std::span<double> z) {
    active().lincomb(a, x.data(), b, y.data(), z.data(), x.size());
}

} // namespace swrhc::kernels
