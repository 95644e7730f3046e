#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace swrhc {

/// Compressed-row layout shared by every operator assembled on one mesh.
/// The pattern is structurally symmetric and always stores the diagonal, so
/// a transpose only permutes the value array.
class SparsityPattern {
public:
    /// Builds the pattern from (row, col) pairs; duplicates are merged and
    /// the structure is symmetrized.
    SparsityPattern(std::size_t n, std::vector<std::pair<std::uint32_t, std::uint32_t>> entries);

    std::size_t size() const { return n_; }
    std::size_t nnz() const { return cols_.size(); }
    std::span<const std::size_t> row_ptr() const { return row_ptr_; }
    std::span<const std::uint32_t> cols() const { return cols_; }

    /// Index of (row, col) in the value array, or nnz() when not stored.
    std::size_t find(std::size_t row, std::size_t col) const;

    /// transpose_index()[k] is the slot of the mirrored entry of slot k.
    std::span<const std::size_t> transpose_index() const { return transpose_; }

    /// max |row - col| over stored entries
    std::size_t half_bandwidth() const { return half_bandwidth_; }

private:
    std::size_t n_;
    std::vector<std::size_t> row_ptr_;
    std::vector<std::uint32_t> cols_;
    std::vector<std::size_t> transpose_;
    std::size_t half_bandwidth_ = 0;
};

class CsrMatrix {
public:
    CsrMatrix() = default;
    explicit CsrMatrix(std::shared_ptr<const SparsityPattern> pattern);
    CsrMatrix(std::shared_ptr<const SparsityPattern> pattern, std::vector<double> values);

    std::size_t rows() const { return pattern_ ? pattern_->size() : 0; }
    const SparsityPattern& pattern() const { return *pattern_; }
    const std::shared_ptr<const SparsityPattern>& shared_pattern() const { return pattern_; }

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    /// Zero when (row, col) is outside the pattern.
    double at(std::size_t row, std::size_t col) const;
    void add(std::size_t row, std::size_t col, double v);

    /// y = A x
    void multiply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> multiply(std::span<const double> x) const;

    /// x^T A x
    double quadratic_form(std::span<const double> x) const;

    CsrMatrix transposed() const;

    /// Row-major dense copy, for tests and small diagnostics.
    std::vector<double> to_dense() const;

private:
    std::shared_ptr<const SparsityPattern> pattern_;
    std::vector<double> values_;
};

/// a * A + b * B; both operands must share the same pattern object.
CsrMatrix lincomb(double a, const CsrMatrix& A, double b, const CsrMatrix& B);

/// Sparse vector with sorted indices.
struct SparseVector {
    std::size_t size = 0;
    std::vector<std::uint32_t> indices;
    std::vector<double> values;

    double dot(std::span<const double> dense) const {
        double s = 0.0;
        for (std::size_t k = 0; k < indices.size(); ++k) s += values[k] * dense[indices[k]];
        return s;
    }

    void add_to(double scale, std::span<double> dense) const {
        for (std::size_t k = 0; k < indices.size(); ++k) dense[indices[k]] += scale * values[k];
    }
};

} // namespace swrhc
