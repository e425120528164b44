#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace ossdp {

struct Triplet {
    int row;
    int col;
    double value;
};

/// Sparse real matrix in compressed-column form. Construction goes through
/// triplets; canonicalization sorts row indices within each column, sums
/// duplicates and drops explicit zeros.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(int rows, int cols);

    static SparseMatrix from_triplets(int rows, int cols,
                                      std::span<const Triplet> entries);
    static SparseMatrix identity(int n);

    int rows() const { return nrows_; }
    int cols() const { return ncols_; }
    std::int64_t nnz() const { return static_cast<std::int64_t>(val_.size()); }

    const std::vector<int>& col_ptr() const { return colp_; }
    const std::vector<int>& row_idx() const { return rowi_; }
    const std::vector<double>& values() const { return val_; }
    /// Mutable values for in-place numeric updates on a fixed pattern.
    std::vector<double>& values() { return val_; }

    /// Value at (r, c); zero if the entry is not stored.
    double coeff(int r, int c) const;
    /// Index into values() of entry (r, c), or -1 if not stored.
    int find(int r, int c) const;

    /// y = M x.
    std::vector<double> multiply(std::span<const double> x) const;
    /// y += alpha * M x.
    void multiply_add(std::span<const double> x, std::span<double> y,
                      double alpha = 1.0) const;
    /// y = M^T x.
    std::vector<double> multiply_transpose(std::span<const double> x) const;

    SparseMatrix transposed() const;

    /// Dense row-major copy (small matrices, tests and the dense KKT path).
    std::vector<double> to_dense_row_major() const;

    /// "rows cols nnz" header followed by one "row col value" line per entry.
    void write_triplets(std::ostream& os) const;

private:
    int nrows_ = 0;
    int ncols_ = 0;
    std::vector<int> colp_{0};
    std::vector<int> rowi_;
    std::vector<double> val_;
};

/// Block assembly: grid[i][j] == nullptr stands for a zero block. Every row
/// and column of the grid must contain at least one block, and block
/// dimensions must agree along rows and columns.
SparseMatrix bmat(
    const std::vector<std::vector<const SparseMatrix*>>& grid);

SparseMatrix hstack(std::span<const SparseMatrix* const> blocks);
SparseMatrix vstack(std::span<const SparseMatrix* const> blocks);

}  // namespace ossdp
