#include "swrhc/sparse.hpp"

#include "swrhc/error.hpp"
#include "swrhc/kernels.hpp"

#include <algorithm>

namespace swrhc {

SparsityPattern::SparsityPattern(std::size_t n,
                                 std::vector<std::pair<std::uint32_t, std::uint32_t>> entries)
    : n_(n) {
    const std::size_t given = entries.size();
    entries.reserve(2 * given + n);
    for (std::size_t k = 0; k < given; ++k) {
        const auto [r, c] = entries[k];
        if (r >= n || c >= n) throw InvalidArgument("sparsity pattern entry out of range");
        entries.emplace_back(c, r);
    }
    for (std::size_t i = 0; i < n; ++i) {
        entries.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i));
    }
    std::sort(entries.begin(), entries.end());
    entries.erase(std::unique(entries.begin(), entries.end()), entries.end());

    row_ptr_.assign(n + 1, 0);
    cols_.reserve(entries.size());
    for (const auto& [r, c] : entries) {
        ++row_ptr_[r + 1];
        cols_.push_back(c);
        half_bandwidth_ = std::max<std::size_t>(half_bandwidth_, r > c ? r - c : c - r);
    }
    for (std::size_t i = 0; i < n; ++i) row_ptr_[i + 1] += row_ptr_[i];

    transpose_.resize(cols_.size());
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) transpose_[k] = find(cols_[k], r);
    }
}

std::size_t SparsityPattern::find(std::size_t row, std::size_t col) const {
    if (row >= n_) return nnz();
    const auto first = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row]);
    const auto last = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row + 1]);
    const auto it = std::lower_bound(first, last, static_cast<std::uint32_t>(col));
    if (it == last || *it != col) return nnz();
    return static_cast<std::size_t>(it - cols_.begin());
}

CsrMatrix::CsrMatrix(std::shared_ptr<const SparsityPattern> pattern)
    : pattern_(std::move(pattern)), values_(pattern_->nnz(), 0.0) {}

CsrMatrix::CsrMatrix(std::shared_ptr<const SparsityPattern> pattern, std::vector<double> values)
    : pattern_(std::move(pattern)), values_(std::move(values)) {
    if (values_.size() != pattern_->nnz()) throw InvalidArgument("value array does not match pattern");
}

double CsrMatrix::at(std::size_t row, std::size_t col) const {
    const std::size_t k = pattern_->find(row, col);
    return k == pattern_->nnz() ? 0.0 : values_[k];
}

void CsrMatrix::add(std::size_t row, std::size_t col, double v) {
    const std::size_t k = pattern_->find(row, col);
    if (k == pattern_->nnz()) throw InvalidArgument("entry outside sparsity pattern");
    values_[k] += v;
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    if (x.size() != rows() || y.size() != rows()) throw InvalidArgument("spmv dimension mismatch");
    kernels::active().csr_spmv(rows(), pattern_->row_ptr().data(), pattern_->cols().data(),
                               values_.data(), x.data(), y.data());
}

std::vector<double> CsrMatrix::multiply(std::span<const double> x) const {
    std::vector<double> y(rows());
    multiply(x, y);
    return y;
}

double CsrMatrix::quadratic_form(std::span<const double> x) const {
    const std::vector<double> ax = multiply(x);
    return kernels::dot(x, ax);
}

CsrMatrix CsrMatrix::transposed() const {
    std::vector<double> t(values_.size());
    const auto perm = pattern_->transpose_index();
    for (std::size_t k = 0; k < values_.size(); ++k) t[perm[k]] = values_[k];
    return CsrMatrix(pattern_, std::move(t));
}

std::vector<double> CsrMatrix::to_dense() const {
    const std::size_t n = rows();
    std::vector<double> dense(n * n, 0.0);
    const auto rp = pattern_->row_ptr();
    const auto cols = pattern_->cols();
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t k = rp[r]; k < rp[r + 1]; ++k) dense[r * n + cols[k]] = values_[k];
    }
    return dense;
}

CsrMatrix lincomb(double a, const CsrMatrix& A, double b, const CsrMatrix& B) {
    if (A.shared_pattern() != B.shared_pattern()) throw InvalidArgument("lincomb requires a shared pattern");
    CsrMatrix out(A.shared_pattern());
    kernels::lincomb(a, A.values(), b, B.values(), out.values());
    return out;
}

} // namespace swrhc
