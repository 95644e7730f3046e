#include "swrhc/band_lu.hpp"

#include "swrhc/error.hpp"
#include "swrhc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace swrhc {

BandLu::BandLu(const CsrMatrix& matrix) : n_(matrix.rows()), w_(matrix.pattern().half_bandwidth()) {
    const std::size_t stride = 2 * w_ + 1;
    std::vector<double> band(n_ * stride, 0.0);
    const auto row = [&](std::size_t i) { return band.data() + i * stride; };
    const auto rp = matrix.pattern().row_ptr();
    const auto cols = matrix.pattern().cols();
    const auto vals = matrix.values();
    for (std::size_t r = 0; r < n_; ++r) {
        for (std::size_t k = rp[r]; k < rp[r + 1]; ++k) row(r)[cols[k] + w_ - r] = vals[k];
    }

    const auto& kt = kernels::active();
    for (std::size_t p = 0; p < n_; ++p) {
        const double pivot = row(p)[w_];
        if (!std::isfinite(pivot) || std::abs(pivot) < 1e-300) {
            throw NumericalFailure("band LU: zero or non-finite pivot at row " + std::to_string(p));
        }
        const std::size_t last = std::min(n_ - 1, p + w_);
        for (std::size_t i = p + 1; i <= last; ++i) {
            double* ri = row(i);
            const std::size_t off = p + w_ - i;
            const double l = ri[off] / pivot;
            ri[off] = l;
            if (l != 0.0) kt.axpy(-l, row(p) + w_ + 1, ri + off + 1, w_);
        }
    }

    lower_.assign(n_ * w_, 0.0);
    upper_.assign(n_ * w_, 0.0);
    inv_pivot_.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) {
        inv_pivot_[j] = 1.0 / row(j)[w_];
        const std::size_t len = tail(j);
        std::copy_n(row(j) + w_ + 1, len, upper_.data() + j * w_);
        for (std::size_t t = 0; t < len; ++t) lower_[j * w_ + t] = row(j + 1 + t)[w_ - 1 - t];
    }
}

void BandLu::solve(std::span<const double> b, std::span<double> x) const {
    if (b.size() != n_ || x.size() != n_) throw InvalidArgument("band LU solve dimension mismatch");
    if (x.data() != b.data()) std::copy(b.begin(), b.end(), x.begin());
    if (n_ == 0) return;
    const auto& kt = kernels::active();
    // L z = b by columns
    for (std::size_t j = 0; j + 1 < n_; ++j) {
        if (x[j] != 0.0) kt.axpy(-x[j], lcol(j), x.data() + j + 1, tail(j));
    }
    // U x = z by rows
    for (std::size_t i = n_; i-- > 0;) {
        x[i] = (x[i] - kt.dot(urow(i), x.data() + i + 1, tail(i))) * inv_pivot_[i];
    }
}

void BandLu::solve_transpose(std::span<const double> b, std::span<double> x) const {
    if (b.size() != n_ || x.size() != n_) throw InvalidArgument("band LU solve dimension mismatch");
    if (x.data() != b.data()) std::copy(b.begin(), b.end(), x.begin());
    if (n_ == 0) return;
    const auto& kt = kernels::active();
    // U^T z = b: row i of U is column i of U^T
    for (std::size_t i = 0; i < n_; ++i) {
        x[i] *= inv_pivot_[i];
        if (x[i] != 0.0) kt.axpy(-x[i], urow(i), x.data() + i + 1, tail(i));
    }
    // L^T x = z, unit diagonal: column j of L is row j of L^T
    for (std::size_t j = n_ - 1; j-- > 0;) x[j] -= kt.dot(lcol(j), x.data() + j + 1, tail(j));
}

} // namespace swrhc
