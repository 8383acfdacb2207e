#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <tuple>
#include <vector>

namespace tcx {

using Index = std::uint32_t;

// Compressed sparse row matrix of nonnegative reals. Logically dense:
// entries absent from the pattern read as zero. Column indices inside
// a row are strictly increasing.
class CsrMatrix {
public:
    struct Triplet {
        Index row;
        Index col;
        double value;
    };

    CsrMatrix() = default;
    CsrMatrix(std::size_t rows, std::size_t cols);

    // Duplicate (row, col) pairs are summed in input order; zeros dropped.
    static CsrMatrix from_triplets(std::size_t rows, std::size_t cols,
                                   std::vector<Triplet> triplets);
    static CsrMatrix from_dense(const std::vector<std::vector<double>>& dense);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t nonzeros() const noexcept { return values_.size(); }

    std::span<const Index> row_indices(std::size_t r) const {
        return {col_idx_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
    }
    std::span<const double> row_values(std::size_t r) const {
        return {values_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
    }

    double at(std::size_t r, std::size_t c) const;

    std::vector<double> row_sums() const;
    std::vector<double> col_sums() const;
    double total() const;

    // Keep the listed rows / columns (in the given order), reindexing.
    CsrMatrix select_rows(std::span<const Index> keep) const;
    CsrMatrix select_cols(std::span<const Index> keep) const;

    // Same pattern, values transformed by f(row, col, value).
    template <class F>
    CsrMatrix map_values(F&& f) const {
        CsrMatrix out = *this;
        for (std::size_t r = 0; r < rows_; ++r) {
            for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
                out.values_[k] = f(r, col_idx_[k], values_[k]);
            }
        }
        return out;
    }

    std::vector<std::vector<double>> to_dense() const;

    friend bool operator==(const CsrMatrix&, const CsrMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<Index> col_idx_;
    std::vector<double> values_;
};

}  // namespace tcx
