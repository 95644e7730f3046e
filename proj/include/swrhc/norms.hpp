#pragma once

#include "swrhc/band_lu.hpp"
#include "swrhc/fem.hpp"
#include "swrhc/sparse.hpp"

#include <span>

namespace swrhc {

/// Discrete H = L2, V = W^{1,2} and V' = W^{-1,2} norms built on
/// A = nu K + M. The V' norm is the dual norm through the discrete Riesz
/// map: |y|_{V'}^2 = f^T A^{-1} f with f = M y.
class NormContext {
public:
    explicit NormContext(const OperatorSet& ops);
    NormContext(CsrMatrix mass, CsrMatrix a_operator);

    const CsrMatrix& mass() const { return mass_; }
    const CsrMatrix& a_operator() const { return a_op_; }

    double h_norm(std::span<const double> y) const;
    double v_norm(std::span<const double> y) const;
    double vprime_norm(std::span<const double> y) const;

    /// Dual norm of a functional given by its load vector f: sqrt(f^T A^{-1} f).
    double dual_norm(std::span<const double> f) const;

private:
    CsrMatrix mass_;
    CsrMatrix a_op_;
    BandLu a_lu_;
};

} // namespace swrhc
