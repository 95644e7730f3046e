#pragma once

#include "swrhc/sparse.hpp"

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

namespace swrhc {

/// LU factorization without pivoting of a banded matrix.
///
/// Intended for matrices whose symmetric part is positive definite (the
/// Crank-Nicolson left-hand sides and the discrete A = nu K + M), for which
/// elimination without pivoting is stable. A vanishing or non-finite pivot
/// raises NumericalFailure.
///
/// Elimination runs on a row-major band (row i keeps columns [i-w, i+w]).
/// The factors are then split: L by columns below the unit diagonal, U by
/// rows right of the diagonal, plus the reciprocal pivots. Each triangular
/// sweep of solve and solve_transpose is then one contiguous axpy or dot
/// per row.
class BandLu {
public:
    BandLu() = default;
    explicit BandLu(const CsrMatrix& matrix);

    std::size_t size() const { return n_; }
    std::size_t half_bandwidth() const { return w_; }

    /// Solves A x = b. x and b may alias.
    void solve(std::span<const double> b, std::span<double> x) const;

    /// Solves A^T x = b. x and b may alias.
    void solve_transpose(std::span<const double> b, std::span<double> x) const;

private:
    // L(j+1+t, j), t < w
    const double* lcol(std::size_t j) const { return lower_.data() + j * w_; }
    // U(i, i+1+t), t < w
    const double* urow(std::size_t i) const { return upper_.data() + i * w_; }
    std::size_t tail(std::size_t i) const { return std::min(w_, n_ - 1 - i); }

    std::size_t n_ = 0;
    std::size_t w_ = 0;
    std::vector<double> lower_;
    std::vector<double> upper_;
    std::vector<double> inv_pivot_;
};

} // namespace swrhc
