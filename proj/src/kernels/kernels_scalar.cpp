#include "swrhc/kernels.hpp"

namespace swrhc::kernels {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void lincomb_scalar(double a, const double* x, double b, const double* y, double* z, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) z[i] = a * x[i] + b * y[i];
}

void csr_spmv_scalar(std::size_t n_rows, const std::size_t* row_ptr, const std::uint32_t* cols,
                     const double* vals, const double* x, double* y) {
    for (std::size_t r = 0; r < n_rows; ++r) {
        double s = 0.0;
        for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += vals[k] * x[cols[k]];
        y[r] = s;
    }
}

} // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{Isa::scalar, dot_scalar, axpy_scalar, lincomb_scalar, csr_spmv_scalar};
    return table;
}

} // namespace swrhc::kernels
