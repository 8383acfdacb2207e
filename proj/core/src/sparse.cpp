#include "tcx/sparse.hpp"

#include "tcx/error.hpp"

namespace tcx {

CsrMatrix::CsrMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

CsrMatrix CsrMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                   std::vector<Triplet> triplets) {
    for (const auto& t : triplets) {
        if (t.row >= rows || t.col >= cols) {
            throw ArgumentError("CsrMatrix: triplet index out of range");
        }
    }
    // Stable so duplicates accumulate in caller order.
    std::stable_sort(triplets.begin(), triplets.end(),
                     [](const Triplet& a, const Triplet& b) {
                         return std::tie(a.row, a.col) < std::tie(b.row, b.col);
                     });

    CsrMatrix m(rows, cols);
    m.col_idx_.reserve(triplets.size());
    m.values_.reserve(triplets.size());
    std::size_t i = 0;
    while (i < triplets.size()) {
        const Index r = triplets[i].row;
        const Index c = triplets[i].col;
        double sum = 0.0;
        for (; i < triplets.size() && triplets[i].row == r && triplets[i].col == c; ++i) {
            sum += triplets[i].value;
        }
        if (sum != 0.0) {
            m.col_idx_.push_back(c);
            m.values_.push_back(sum);
            ++m.row_ptr_[r + 1];
        }
    }
    for (std::size_t r = 0; r < rows; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
    return m;
}

CsrMatrix CsrMatrix::from_dense(const std::vector<std::vector<double>>& dense) {
    const std::size_t rows = dense.size();
    const std::size_t cols = rows == 0 ? 0 : dense.front().size();
    std::vector<Triplet> t;
    for (std::size_t r = 0; r < rows; ++r) {
        if (dense[r].size() != cols) throw ArgumentError("CsrMatrix: ragged dense input");
        for (std::size_t c = 0; c < cols; ++c) {
            if (dense[r][c] != 0.0) {
                t.push_back({static_cast<Index>(r), static_cast<Index>(c), dense[r][c]});
            }
        }
    }
    return from_triplets(rows, cols, std::move(t));
}

double CsrMatrix::at(std::size_t r, std::size_t c) const {
    const auto idx = row_indices(r);
    const auto it = std::lower_bound(idx.begin(), idx.end(), static_cast<Index>(c));
    if (it == idx.end() || *it != c) return 0.0;
    return values_[row_ptr_[r] + static_cast<std::size_t>(it - idx.begin())];
}

std::vector<double> CsrMatrix::row_sums() const {
    std::vector<double> s(rows_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (double v : row_values(r)) s[r] += v;
    }
    return s;
}

std::vector<double> CsrMatrix::col_sums() const {
    std::vector<double> s(cols_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r) {
        const auto idx = row_indices(r);
        const auto val = row_values(r);
        for (std::size_t k = 0; k < idx.size(); ++k) s[idx[k]] += val[k];
    }
    return s;
}

double CsrMatrix::total() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s;
}

CsrMatrix CsrMatrix::select_rows(std::span<const Index> keep) const {
    CsrMatrix m(keep.size(), cols_);
    for (std::size_t i = 0; i < keep.size(); ++i) {
        const auto idx = row_indices(keep[i]);
        const auto val = row_values(keep[i]);
        m.col_idx_.insert(m.col_idx_.end(), idx.begin(), idx.end());
        m.values_.insert(m.values_.end(), val.begin(), val.end());
        m.row_ptr_[i + 1] = m.col_idx_.size();
    }
    return m;
}

CsrMatrix CsrMatrix::select_cols(std::span<const Index> keep) const {
    constexpr Index kDropped = static_cast<Index>(-1);
    std::vector<Index> remap(cols_, kDropped);
    for (std::size_t i = 0; i < keep.size(); ++i) remap[keep[i]] = static_cast<Index>(i);

    std::vector<Triplet> t;
    t.reserve(values_.size());
    for (std::size_t r = 0; r < rows_; ++r) {
        const auto idx = row_indices(r);
        const auto val = row_values(r);
        for (std::size_t k = 0; k < idx.size(); ++k) {
            if (remap[idx[k]] != kDropped) {
                t.push_back({static_cast<Index>(r), remap[idx[k]], val[k]});
            }
        }
    }
    return from_triplets(rows_, keep.size(), std::move(t));
}

std::vector<std::vector<double>> CsrMatrix::to_dense() const {
    std::vector<std::vector<double>> d(rows_, std::vector<double>(cols_, 0.0));
    for (std::size_t r = 0; r < rows_; ++r) {
        const auto idx = row_indices(r);
        const auto val = row_values(r);
        for (std::size_t k = 0; k < idx.size(); ++k) d[r][idx[k]] = val[k];
    }
    return d;
}

}  // namespace tcx
