#include "swrhc/norms.hpp"

#include "swrhc/error.hpp"
#include "swrhc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace swrhc {
namespace {

double sqrt_nonneg(double q) {
    if (!std::isfinite(q)) throw NumericalFailure("norm evaluation produced a non-finite value");
    return std::sqrt(std::max(q, 0.0));
}

} // namespace

NormContext::NormContext(const OperatorSet& ops) : NormContext(ops.mass(), ops.a_operator()) {}

NormContext::NormContext(CsrMatrix mass, CsrMatrix a_operator)
    : mass_(std::move(mass)), a_op_(std::move(a_operator)), a_lu_(a_op_) {
    if (mass_.rows() != a_op_.rows()) throw InvalidArgument("norm operators differ in size");
}

double NormContext::h_norm(std::span<const double> y) const {
    if (y.size() != mass_.rows()) throw InvalidArgument("h_norm: dimension mismatch");
    return sqrt_nonneg(mass_.quadratic_form(y));
}

double NormContext::v_norm(std::span<const double> y) const {
    if (y.size() != a_op_.rows()) throw InvalidArgument("v_norm: dimension mismatch");
    return sqrt_nonneg(a_op_.quadratic_form(y));
}

double NormContext::vprime_norm(std::span<const double> y) const {
    if (y.size() != mass_.rows()) throw InvalidArgument("vprime_norm: dimension mismatch");
    return dual_norm(mass_.multiply(y));
}

double NormContext::dual_norm(std::span<const double> f) const {
    if (f.size() != a_op_.rows()) throw InvalidArgument("dual_norm: dimension mismatch");
    std::vector<double> w(f.size());
    a_lu_.solve(f, w);
    return sqrt_nonneg(kernels::dot(f, w));
}

} // namespace swrhc
