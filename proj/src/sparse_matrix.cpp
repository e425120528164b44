#include "ossdp/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace ossdp {

SparseMatrix::SparseMatrix(int rows, int cols) : nrows_(rows), ncols_(cols) {
    if (rows < 0 || cols < 0)
        throw std::invalid_argument("SparseMatrix: negative dimension");
    colp_.assign(static_cast<size_t>(cols) + 1, 0);
}

SparseMatrix SparseMatrix::from_triplets(int rows, int cols,
                                         std::span<const Triplet> entries) {
    SparseMatrix m(rows, cols);
    for (const auto& t : entries) {
        if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
            throw std::out_of_range("SparseMatrix: triplet index out of range");
        if (!std::isfinite(t.value))
            throw std::invalid_argument("SparseMatrix: non-finite value");
    }
    // counting sort by column
    std::vector<int> count(static_cast<size_t>(cols) + 1, 0);
    for (const auto& t : entries) ++count[static_cast<size_t>(t.col) + 1];
    std::partial_sum(count.begin(), count.end(), count.begin());
    std::vector<int> ri(entries.size());
    std::vector<double> vv(entries.size());
    {
        std::vector<int> next(count.begin(), count.end() - 1);
        for (const auto& t : entries) {
            const int p = next[static_cast<size_t>(t.col)]++;
            ri[static_cast<size_t>(p)] = t.row;
            vv[static_cast<size_t>(p)] = t.value;
        }
    }
    // per-column: sort by row, merge duplicates, drop zeros
    m.rowi_.reserve(entries.size());
    m.val_.reserve(entries.size());
    std::vector<int> order;
    for (int c = 0; c < cols; ++c) {
        const int lo = count[static_cast<size_t>(c)];
        const int hi = count[static_cast<size_t>(c) + 1];
        order.resize(static_cast<size_t>(hi - lo));
        std::iota(order.begin(), order.end(), lo);
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return ri[static_cast<size_t>(a)] < ri[static_cast<size_t>(b)]; });
        size_t p = 0;
        while (p < order.size()) {
            const int r = ri[static_cast<size_t>(order[p])];
            double s = 0.0;
            while (p < order.size() && ri[static_cast<size_t>(order[p])] == r)
                s += vv[static_cast<size_t>(order[p++])];
            if (s != 0.0) {
                m.rowi_.push_back(r);
                m.val_.push_back(s);
            }
        }
        m.colp_[static_cast<size_t>(c) + 1] = static_cast<int>(m.rowi_.size());
    }
    return m;
}

SparseMatrix SparseMatrix::identity(int n) {
    std::vector<Triplet> t;
    t.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) t.push_back({i, i, 1.0});
    return from_triplets(n, n, t);
}

int SparseMatrix::find(int r, int c) const {
    if (r < 0 || r >= nrows_ || c < 0 || c >= ncols_)
        throw std::out_of_range("SparseMatrix: index out of range");
    const int lo = colp_[static_cast<size_t>(c)];
    const int hi = colp_[static_cast<size_t>(c) + 1];
    auto it = std::lower_bound(rowi_.begin() + lo, rowi_.begin() + hi, r);
    if (it != rowi_.begin() + hi && *it == r)
        return static_cast<int>(it - rowi_.begin());
    return -1;
}

double SparseMatrix::coeff(int r, int c) const {
    const int p = find(r, c);
    return p < 0 ? 0.0 : val_[static_cast<size_t>(p)];
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
    std::vector<double> y(static_cast<size_t>(nrows_), 0.0);
    multiply_add(x, y);
    return y;
}

void SparseMatrix::multiply_add(std::span<const double> x, std::span<double> y,
                                double alpha) const {
    if (x.size() != static_cast<size_t>(ncols_) ||
        y.size() != static_cast<size_t>(nrows_))
        throw std::invalid_argument("SparseMatrix: dimension mismatch");
    for (int c = 0; c < ncols_; ++c) {
        const double xc = alpha * x[static_cast<size_t>(c)];
        if (xc == 0.0) continue;
        for (int p = colp_[static_cast<size_t>(c)];
             p < colp_[static_cast<size_t>(c) + 1]; ++p)
            y[static_cast<size_t>(rowi_[static_cast<size_t>(p)])] +=
                val_[static_cast<size_t>(p)] * xc;
    }
}

std::vector<double> SparseMatrix::multiply_transpose(
    std::span<const double> x) const {
    if (x.size() != static_cast<size_t>(nrows_))
        throw std::invalid_argument("SparseMatrix: dimension mismatch");
    std::vector<double> y(static_cast<size_t>(ncols_), 0.0);
    for (int c = 0; c < ncols_; ++c) {
        double s = 0.0;
        for (int p = colp_[static_cast<size_t>(c)];
             p < colp_[static_cast<size_t>(c) + 1]; ++p)
            s += val_[static_cast<size_t>(p)] *
                 x[static_cast<size_t>(rowi_[static_cast<size_t>(p)])];
        y[static_cast<size_t>(c)] = s;
    }
    return y;
}

SparseMatrix SparseMatrix::transposed() const {
    SparseMatrix t(ncols_, nrows_);
    t.colp_.assign(static_cast<size_t>(nrows_) + 1, 0);
    for (int r : rowi_) ++t.colp_[static_cast<size_t>(r) + 1];
    std::partial_sum(t.colp_.begin(), t.colp_.end(), t.colp_.begin());
    t.rowi_.resize(val_.size());
    t.val_.resize(val_.size());
    std::vector<int> next(t.colp_.begin(), t.colp_.end() - 1);
    for (int c = 0; c < ncols_; ++c)
        for (int p = colp_[static_cast<size_t>(c)];
             p < colp_[static_cast<size_t>(c) + 1]; ++p) {
            const int r = rowi_[static_cast<size_t>(p)];
            const int q = next[static_cast<size_t>(r)]++;
            t.rowi_[static_cast<size_t>(q)] = c;
            t.val_[static_cast<size_t>(q)] = val_[static_cast<size_t>(p)];
        }
    return t;
}

std::vector<double> SparseMatrix::to_dense_row_major() const {
    std::vector<double> d(static_cast<size_t>(nrows_) * static_cast<size_t>(ncols_), 0.0);
    for (int c = 0; c < ncols_; ++c)
        for (int p = colp_[static_cast<size_t>(c)];
             p < colp_[static_cast<size_t>(c) + 1]; ++p)
            d[static_cast<size_t>(rowi_[static_cast<size_t>(p)]) *
                  static_cast<size_t>(ncols_) +
              static_cast<size_t>(c)] = val_[static_cast<size_t>(p)];
    return d;
}

void SparseMatrix::write_triplets(std::ostream& os) const {
    os << nrows_ << ' ' << ncols_ << ' ' << nnz() << '\n';
    for (int c = 0; c < ncols_; ++c)
        for (int p = colp_[static_cast<size_t>(c)];
             p < colp_[static_cast<size_t>(c) + 1]; ++p)
            os << rowi_[static_cast<size_t>(p)] << ' ' << c << ' '
               << val_[static_cast<size_t>(p)] << '\n';
}

SparseMatrix bmat(const std::vector<std::vector<const SparseMatrix*>>& grid) {
    if (grid.empty())
        throw std::invalid_argument("bmat: empty grid");
    const size_t ncols_grid = grid.front().size();
    for (const auto& row : grid)
        if (row.size() != ncols_grid)
            throw std::invalid_argument("bmat: ragged grid");

    std::vector<int> row_h(grid.size(), -1);
    std::vector<int> col_w(ncols_grid, -1);
    for (size_t i = 0; i < grid.size(); ++i)
        for (size_t j = 0; j < ncols_grid; ++j) {
            const SparseMatrix* blk = grid[i][j];
            if (!blk) continue;
            if (row_h[i] < 0) row_h[i] = blk->rows();
            else if (row_h[i] != blk->rows())
                throw std::invalid_argument("bmat: row height mismatch");
            if (col_w[j] < 0) col_w[j] = blk->cols();
            else if (col_w[j] != blk->cols())
                throw std::invalid_argument("bmat: column width mismatch");
        }
    for (int h : row_h)
        if (h < 0) throw std::invalid_argument("bmat: row of all-null blocks");
    for (int w : col_w)
        if (w < 0) throw std::invalid_argument("bmat: column of all-null blocks");

    std::vector<int> row_off(grid.size() + 1, 0);
    for (size_t i = 0; i < grid.size(); ++i) row_off[i + 1] = row_off[i] + row_h[i];
    std::vector<int> col_off(ncols_grid + 1, 0);
    for (size_t j = 0; j < ncols_grid; ++j) col_off[j + 1] = col_off[j] + col_w[j];

    std::vector<Triplet> tr;
    std::int64_t total = 0;
    for (const auto& row : grid)
        for (const SparseMatrix* blk : row)
            if (blk) total += blk->nnz();
    tr.reserve(static_cast<size_t>(total));
    for (size_t i = 0; i < grid.size(); ++i)
        for (size_t j = 0; j < ncols_grid; ++j) {
            const SparseMatrix* blk = grid[i][j];
            if (!blk) continue;
            for (int c = 0; c < blk->cols(); ++c)
                for (int p = blk->col_ptr()[static_cast<size_t>(c)];
                     p < blk->col_ptr()[static_cast<size_t>(c) + 1]; ++p)
                    tr.push_back({row_off[i] + blk->row_idx()[static_cast<size_t>(p)],
                                  col_off[j] + c,
                                  blk->values()[static_cast<size_t>(p)]});
        }
    return SparseMatrix::from_triplets(row_off.back(), col_off.back(), tr);
}

SparseMatrix hstack(std::span<const SparseMatrix* const> blocks) {
    std::vector<std::vector<const SparseMatrix*>> grid(1);
    grid[0].assign(blocks.begin(), blocks.end());
    return bmat(grid);
}

SparseMatrix vstack(std::span<const SparseMatrix* const> blocks) {
    std::vector<std::vector<const SparseMatrix*>> grid;
    for (const SparseMatrix* b : blocks) grid.push_back({b});
    return bmat(grid);
}

}  // namespace ossdp
