#include "ossdp/sdp_builder.hpp"

#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ossdp {

VarIndex::VarIndex(int k, int n_side) : n(n_side), k_queries(k) {
    if (k < 2 || n_side < 1)
        throw std::invalid_argument("VarIndex: need k >= 2 and N >= 1");
    block_size = n_side * (n_side + 1) / 2;
    total = (k - 1) * block_size;
}

int list_position(int i, int j, int b, const VarIndex& ctx) {
    const int n = ctx.n;
    if (i < 0 || i >= n || j < 0 || j >= n)
        throw std::out_of_range("list_position: entry index out of range");
    if (b < 1 || b > ctx.k_queries - 1)
        throw std::out_of_range("list_position: block index out of range");
    if (i < j) std::swap(i, j);
    return n * (n + 1) / 2 - (n - j) * (n - j + 1) / 2 + i - j +
           (b - 1) * ctx.block_size;
}

int indep_trace_count(int n) {
    return n % 2 == 0 ? n / 2 - 1 : (n - 1) / 2;
}

double tr_i(const SymMatrix& x, int i) {
    const int n = x.size();
    if (i <= -n || i >= n)
        throw std::out_of_range("tr_i: diagonal index out of range");
    double s = 0.0;
    if (i >= 0) {
        for (int l = 0; l < n - i; ++l) s += x(l, l + i);
    } else {
        for (int l = 0; l < n + i; ++l) s += x(l - i, l);
    }
    return s;
}

double signed_trace(const SymMatrix& x, int t, int i) {
    const int n = x.size();
    if (i < 1 || i > n - 1)
        throw std::out_of_range("signed_trace: index must be in 1..N-1");
    const double sign = t % 2 == 0 ? 1.0 : -1.0;
    return tr_i(x, i) + sign * tr_i(x, i - n);
}

namespace {

// coefficients of (T_t X)_i on packed block b, accumulated into triplets
void add_signed_trace_row(std::vector<Triplet>& out, int row, int t, int i,
                          int b, const VarIndex& ctx, double fac) {
    const int n = ctx.n;
    for (int l = 0; l < n - i; ++l)
        out.push_back({row, list_position(l + i, l, b, ctx), fac});
    const double sign = fac * (t % 2 == 0 ? 1.0 : -1.0);
    for (int l = 0; l < i; ++l)
        out.push_back({row, list_position(l + n - i, l, b, ctx), sign});
}

}  // namespace

SdpInstance build_instance(int k, int n) {
    if (k < 2) throw std::invalid_argument("build_instance: k must be >= 2");
    if (n < 2) throw std::invalid_argument("build_instance: N must be >= 2");

    SdpInstance inst;
    inst.n = n;
    inst.k_queries = k;
    inst.vars = VarIndex(k, n);
    inst.num_blocks = k - 1;
    inst.indep_count = indep_trace_count(n);

    const int pi = inst.indep_count;
    const int rows = (k - 1) + k * pi;
    const SymMatrix e_over_n = SymMatrix::ones_over_n(n);
    const SymMatrix i_over_n = SymMatrix::identity_over_n(n);

    std::vector<Triplet> tr;
    tr.reserve(static_cast<size_t>((k - 1) * n + 2 * n * pi + (k - 2) * 2 * n * pi));
    inst.b_vec.assign(static_cast<size_t>(rows), 0.0);

    int row = 0;
    for (int b = 1; b <= k - 1; ++b) {  // unit traces
        for (int d = 0; d < n; ++d)
            tr.push_back({row, list_position(d, d, b, inst.vars), 1.0});
        inst.b_vec[static_cast<size_t>(row)] = 1.0;
        ++row;
    }
    for (int i = 1; i <= pi; ++i) {     // t = 1 boundary against E/N
        add_signed_trace_row(tr, row, 1, i, 1, inst.vars, 1.0);
        inst.b_vec[static_cast<size_t>(row)] = signed_trace(e_over_n, 1, i);
        ++row;
    }
    for (int i = 1; i <= pi; ++i) {     // t = k boundary against I/N
        add_signed_trace_row(tr, row, k, i, k - 1, inst.vars, 1.0);
        inst.b_vec[static_cast<size_t>(row)] = signed_trace(i_over_n, k, i);
        ++row;
    }
    for (int t = 2; t <= k - 1; ++t)    // interior interfaces
        for (int i = 1; i <= pi; ++i) {
            add_signed_trace_row(tr, row, t, i, t, inst.vars, 1.0);
            add_signed_trace_row(tr, row, t, i, t - 1, inst.vars, -1.0);
            ++row;
        }

    inst.a_mat = SparseMatrix::from_triplets(rows, inst.vars.total, tr);
    return inst;
}

SparseMatrix psd_block_encoding(const SdpInstance& inst, int b) {
    if (b < 1 || b > inst.num_blocks)
        throw std::out_of_range("psd_block_encoding: block index out of range");
    const int n = inst.n;
    std::vector<Triplet> tr;
    tr.reserve(static_cast<size_t>(n) * static_cast<size_t>(n));
    for (int j = 0; j < n; ++j)
        for (int i = j; i < n; ++i) {
            const int col = list_position(i, j, b, inst.vars);
            tr.push_back({i * n + j, col, -1.0});
            if (i != j) tr.push_back({j * n + i, col, -1.0});
        }
    return SparseMatrix::from_triplets(n * n, inst.vars.total, tr);
}

MidpointRows midpoint_rows(int k, int n) {
    if (k < 2) throw std::invalid_argument("midpoint_rows: k must be >= 2");
    if (n < 2) throw std::invalid_argument("midpoint_rows: N must be >= 2");
    MidpointRows out;
    const VarIndex ctx(k, n);
    if (n % 2 != 0) {
        out.a_mat = SparseMatrix(0, ctx.total);
        return out;
    }
    const int mid = n / 2;
    std::vector<Triplet> tr;
    int row = 0;
    for (int t = 2; t <= k; t += 2) {
        if (t == k) {
            add_signed_trace_row(tr, row, t, mid, k - 1, ctx, 1.0);
            out.b_vec.push_back(signed_trace(SymMatrix::identity_over_n(n), t, mid));
        } else {
            add_signed_trace_row(tr, row, t, mid, t, ctx, 1.0);
            add_signed_trace_row(tr, row, t, mid, t - 1, ctx, -1.0);
            out.b_vec.push_back(0.0);
        }
        ++row;
    }
    out.a_mat = SparseMatrix::from_triplets(row, ctx.total, tr);
    return out;
}

CensusReport census(int k, int n) {
    if (k < 2) throw std::invalid_argument("census: k must be >= 2");
    if (n < 2) throw std::invalid_argument("census: N must be >= 2");
    CensusReport r;
    r.k = k;
    r.n = n;
    const std::int64_t pi = indep_trace_count(n);
    const std::int64_t nn = n;
    const std::int64_t block = nn * (nn + 1) / 2;
    r.rows = (k - 1) + static_cast<std::int64_t>(k) * pi;
    r.cols = (k - 1) * block;
    r.nnz_a = (k - 1) * nn + 2 * nn * pi + (k - 2) * 2 * nn * pi;
    r.nnz_b = (nn + 1) / 2 + (k - 2);
    r.nnz_g = (k - 1) * nn * nn;
    r.dense_cells_a = r.rows * r.cols;
    r.dense_cells_g = (k - 1) * nn * nn * block;
    r.fill_ratio_a = static_cast<double>(r.nnz_a) / static_cast<double>(r.dense_cells_a);
    r.fill_ratio_g = static_cast<double>(r.nnz_g) / static_cast<double>(r.dense_cells_g);
    return r;
}

void write_instance_dump(const SdpInstance& inst, std::ostream& os) {
    os << inst.k_queries << ' ' << inst.n << ' ' << inst.a_mat.rows() << ' '
       << inst.a_mat.cols() << ' ' << inst.a_mat.nnz() << '\n';
    const auto& a = inst.a_mat;
    os.precision(17);
    for (int c = 0; c < a.cols(); ++c)
        for (int p = a.col_ptr()[static_cast<size_t>(c)];
             p < a.col_ptr()[static_cast<size_t>(c) + 1]; ++p)
            os << a.row_idx()[static_cast<size_t>(p)] << ' ' << c << ' '
               << a.values()[static_cast<size_t>(p)] << '\n';
}

std::string census_csv_header() {
    return "k,N,rows,cols,nnz_a,nnz_b,nnz_g,fill_a,fill_g";
}

std::string census_csv_row(const CensusReport& r) {
    std::ostringstream os;
    os.precision(6);
    os << r.k << ',' << r.n << ',' << r.rows << ',' << r.cols << ',' << r.nnz_a
       << ',' << r.nnz_b << ',' << r.nnz_g << ',' << r.fill_ratio_a << ','
       << r.fill_ratio_g;
    return os.str();
}

SymMatrix unpack_block(std::span<const double> x, int b, const VarIndex& ctx) {
    if (x.size() != static_cast<size_t>(ctx.total))
        throw std::invalid_argument("unpack_block: vector size mismatch");
    SymMatrix q(ctx.n);
    for (int j = 0; j < ctx.n; ++j)
        for (int i = j; i < ctx.n; ++i)
            q.set(i, j, x[static_cast<size_t>(list_position(i, j, b, ctx))]);
    return q;
}

}  // namespace ossdp
