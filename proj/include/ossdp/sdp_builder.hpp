#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ossdp/sparse_matrix.hpp"
#include "ossdp/sym_matrix.hpp"

namespace ossdp {

/// Packed lower-triangle indexing of the k-1 unknown blocks: block b in
/// 1..k-1, entry (i, j) with 0 <= j <= i <= N-1 stored column-major.
struct VarIndex {
    int n = 0;
    int k_queries = 0;
    int block_size = 0;  // N(N+1)/2
    int total = 0;       // (k-1) N(N+1)/2

    VarIndex() = default;
    VarIndex(int k, int n_side);
};

/// Flat variable index of block b's entry (i, j); (i, j) and (j, i) map to
/// the same slot.
int list_position(int i, int j, int b, const VarIndex& ctx);

/// Independent signed-trace equations per interface:
/// N/2 - 1 for even N, (N-1)/2 for odd N.
int indep_trace_count(int n);

/// Trace along the i-th superdiagonal (i >= 0) or the (-i)-th subdiagonal
/// (i < 0) of an N x N matrix; |i| <= N-1.
double tr_i(const SymMatrix& x, int i);

/// Signed off-diagonal trace: Tr_i X + (-1)^t Tr_{i-N} X, for i in 1..N-1.
double signed_trace(const SymMatrix& x, int t, int i);

struct SdpInstance {
    int n = 0;
    int k_queries = 0;
    VarIndex vars;
    SparseMatrix a_mat;          // rows = (k-1) + k Pi, cols = total
    std::vector<double> b_vec;
    int num_blocks = 0;          // k-1 PSD blocks of side N
    int indep_count = 0;         // Pi
};

/// Equality system of the feasibility program for (k, N). Row order: one
/// unit-trace row per unknown block; Pi boundary rows against the all-ones
/// start block; Pi boundary rows against the identity end block; then the
/// (k-2) Pi homogeneous interface rows for t = 2..k-1.
SdpInstance build_instance(int k, int n);

/// N^2 x total stacking matrix of block b: entry -1 at rows i*N+j and j*N+i
/// in the column of variable (i, j), so -G_b x lists the block column-major.
SparseMatrix psd_block_encoding(const SdpInstance& inst, int b);

/// The signed-trace rows at i = N/2 that the instance's independent-row
/// convention omits for even N. At an even interface index t the i = N/2
/// equation is not implied by the encoded rows; the solver appends these so
/// that returned certificates satisfy the interface conditions at every i.
/// Empty system for odd N (where the omitted rows are genuinely redundant).
struct MidpointRows {
    SparseMatrix a_mat;          // rows x total, conformable with SdpInstance
    std::vector<double> b_vec;
};
MidpointRows midpoint_rows(int k, int n);

struct CensusReport {
    int k = 0;
    int n = 0;
    std::int64_t rows = 0;
    std::int64_t cols = 0;
    std::int64_t nnz_a = 0;
    std::int64_t nnz_b = 0;
    std::int64_t nnz_g = 0;
    std::int64_t dense_cells_a = 0;
    std::int64_t dense_cells_g = 0;  // per-block column count convention
    double fill_ratio_a = 0.0;
    double fill_ratio_g = 0.0;
};

/// Closed-form sparsity accounting for (k, N); no matrices are built.
CensusReport census(int k, int n);

/// Header "k N rows cols nnz", then one "row col value" line per stored
/// entry of A, 0-based ASCII decimal.
void write_instance_dump(const SdpInstance& inst, std::ostream& os);

std::string census_csv_header();
std::string census_csv_row(const CensusReport& r);

/// Block b (1-based) of a packed variable vector.
SymMatrix unpack_block(std::span<const double> x, int b, const VarIndex& ctx);

}  // namespace ossdp
