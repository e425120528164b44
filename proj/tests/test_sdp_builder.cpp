#include <doctest.h>

#include <random>
#include <sstream>
#include <vector>

#include "ossdp/sdp_builder.hpp"

using namespace ossdp;

namespace {

SymMatrix random_symmetric(int n, std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    SymMatrix m(n);
    for (int j = 0; j < n; ++j)
        for (int i = j; i < n; ++i) m.set(i, j, u(rng));
    return m;
}

std::vector<double> pack(const SymMatrix& q, int b, const VarIndex& ctx) {
    std::vector<double> x(static_cast<size_t>(ctx.total), 0.0);
    for (int j = 0; j < ctx.n; ++j)
        for (int i = j; i < ctx.n; ++i)
            x[static_cast<size_t>(list_position(i, j, b, ctx))] = q(i, j);
    return x;
}

}  // namespace

TEST_CASE("list_position enumerates the packed lower triangle") {
    const VarIndex ctx(3, 3);
    CHECK(ctx.block_size == 6);
    CHECK(ctx.total == 12);
    CHECK(list_position(0, 0, 1, ctx) == 0);
    CHECK(list_position(1, 0, 1, ctx) == 1);
    CHECK(list_position(2, 0, 1, ctx) == 2);
    CHECK(list_position(1, 1, 1, ctx) == 3);
    CHECK(list_position(2, 1, 1, ctx) == 4);
    CHECK(list_position(2, 2, 1, ctx) == 5);
    CHECK(list_position(0, 1, 1, ctx) == 1);  // mirror of (1, 0)
    CHECK(list_position(0, 0, 2, ctx) == 6);  // next block
    CHECK_THROWS_AS(list_position(3, 0, 1, ctx), std::out_of_range);
    CHECK_THROWS_AS(list_position(0, 0, 3, ctx), std::out_of_range);
}

TEST_CASE("list_position is a bijection") {
    for (int k : {2, 3, 5}) {
        for (int n : {2, 3, 7, 10}) {
            const VarIndex ctx(k, n);
            std::vector<int> hit(static_cast<size_t>(ctx.total), 0);
            for (int b = 1; b <= k - 1; ++b)
                for (int j = 0; j < n; ++j)
                    for (int i = j; i < n; ++i)
                        ++hit[static_cast<size_t>(list_position(i, j, b, ctx))];
            for (int h : hit) CHECK(h == 1);
        }
    }
}

TEST_CASE("off-diagonal traces") {
    const SymMatrix e3 = SymMatrix::ones_over_n(3);
    CHECK(tr_i(e3, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(tr_i(e3, -1) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(tr_i(e3, 0) == doctest::Approx(1.0).epsilon(1e-15));

    const SymMatrix i5 = SymMatrix::identity_over_n(5);
    for (int i = 1; i <= 4; ++i) {
        CHECK(tr_i(i5, i) == 0.0);
        CHECK(tr_i(i5, -i) == 0.0);
    }

    std::mt19937 rng(3);
    const SymMatrix q = random_symmetric(6, rng);
    for (int i = -5; i <= 5; ++i)
        CHECK(tr_i(q, i) == doctest::Approx(tr_i(q, -i)).epsilon(1e-15));

    CHECK_THROWS_AS(tr_i(e3, 3), std::out_of_range);
    CHECK_THROWS_AS(tr_i(e3, -3), std::out_of_range);
}

TEST_CASE("signed traces") {
    const SymMatrix e3 = SymMatrix::ones_over_n(3);
    CHECK(signed_trace(e3, 1, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(signed_trace(SymMatrix::identity_over_n(3), 2, 1) == 0.0);
    CHECK_THROWS_AS(signed_trace(e3, 1, 0), std::out_of_range);
    CHECK_THROWS_AS(signed_trace(e3, 1, 3), std::out_of_range);

    // mirror redundancy behind the independent-row count
    std::mt19937 rng(5);
    for (int n : {4, 5, 8, 9}) {
        const SymMatrix x = random_symmetric(n, rng);
        for (int t : {1, 2, 3}) {
            const double sign = t % 2 == 0 ? 1.0 : -1.0;
            for (int i = 1; i <= n - 1; ++i)
                CHECK(signed_trace(x, t, n - i) ==
                      doctest::Approx(sign * signed_trace(x, t, i)).epsilon(1e-13));
        }
    }
}

TEST_CASE("independent row count") {
    CHECK(indep_trace_count(2) == 0);
    CHECK(indep_trace_count(3) == 1);
    CHECK(indep_trace_count(4) == 1);
    CHECK(indep_trace_count(6) == 2);
    CHECK(indep_trace_count(7) == 3);
    CHECK(indep_trace_count(56) == 27);
    CHECK(indep_trace_count(57) == 28);
}

TEST_CASE("the (2,3) instance reproduces the worked boundary row") {
    const SdpInstance inst = build_instance(2, 3);
    CHECK(inst.a_mat.rows() == 3);
    CHECK(inst.a_mat.cols() == 6);
    CHECK(inst.indep_count == 1);
    // row 0: unit trace
    CHECK(inst.a_mat.coeff(0, 0) == 1.0);
    CHECK(inst.a_mat.coeff(0, 3) == 1.0);
    CHECK(inst.a_mat.coeff(0, 5) == 1.0);
    CHECK(inst.b_vec[0] == 1.0);
    // row 1: +1 on q21 and q32, -1 on q31, right-hand side exactly 1/3
    CHECK(inst.a_mat.coeff(1, 1) == 1.0);
    CHECK(inst.a_mat.coeff(1, 4) == 1.0);
    CHECK(inst.a_mat.coeff(1, 2) == -1.0);
    CHECK(inst.a_mat.coeff(1, 0) == 0.0);
    CHECK(inst.b_vec[1] == 1.0 / 3.0);
    // row 2: identity boundary, homogeneous
    CHECK(inst.a_mat.coeff(2, 1) == 1.0);
    CHECK(inst.a_mat.coeff(2, 4) == 1.0);
    CHECK(inst.a_mat.coeff(2, 2) == 1.0);
    CHECK(inst.b_vec[2] == 0.0);

    CHECK_THROWS_AS(build_instance(1, 3), std::invalid_argument);
    CHECK_THROWS_AS(build_instance(2, 1), std::invalid_argument);
}

TEST_CASE("instance shape and stored-entry counts") {
    const SdpInstance i34 = build_instance(3, 4);
    CHECK(i34.indep_count == 1);
    CHECK(i34.a_mat.rows() == 5);
    int nnzb = 0;
    for (double v : i34.b_vec) nnzb += v != 0.0 ? 1 : 0;
    CHECK(nnzb == 3);

    const CensusReport c = census(4, 250);
    CHECK(c.nnz_a == 186750);
    CHECK(c.nnz_g == 187500);
    CHECK(c.dense_cells_g == 5882812500LL);
}

TEST_CASE("census matches measured counts") {
    for (int k = 2; k <= 5; ++k)
        for (int n = 2; n <= 40; ++n) {
            const CensusReport c = census(k, n);
            const SdpInstance inst = build_instance(k, n);
            CHECK(c.rows == inst.a_mat.rows());
            CHECK(c.cols == inst.a_mat.cols());
            CHECK(c.nnz_a == inst.a_mat.nnz());
            int nnzb = 0;
            for (double v : inst.b_vec) nnzb += v != 0.0 ? 1 : 0;
            CHECK(c.nnz_b == nnzb);
            std::int64_t nnzg = 0;
            for (int b = 1; b <= k - 1; ++b)
                nnzg += psd_block_encoding(inst, b).nnz();
            CHECK(c.nnz_g == nnzg);
            CHECK(c.dense_cells_a == c.rows * c.cols);
        }
}

TEST_CASE("block encoding stacks the block column-major") {
    const SdpInstance inst = build_instance(2, 3);
    const SparseMatrix g = psd_block_encoding(inst, 1);
    CHECK(g.rows() == 9);
    CHECK(g.nnz() == 9);
    for (double v : g.values()) CHECK(v == -1.0);

    std::mt19937 rng(17);
    const SymMatrix q = random_symmetric(3, rng);
    const std::vector<double> x = pack(q, 1, inst.vars);
    std::vector<double> stacked = g.multiply(x);
    for (double& v : stacked) v = -v;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            CHECK(stacked[static_cast<size_t>(i * 3 + j)] == doctest::Approx(q(i, j)));
            CHECK(stacked[static_cast<size_t>(i * 3 + j)] ==
                  doctest::Approx(stacked[static_cast<size_t>(j * 3 + i)]));
        }

    CHECK_THROWS_AS(psd_block_encoding(inst, 0), std::out_of_range);
    CHECK_THROWS_AS(psd_block_encoding(inst, 2), std::out_of_range);
}

TEST_CASE("every encoded row equals the trace it stands for") {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        const int k = 2 + static_cast<int>(rng() % 3);
        const int n = 3 + static_cast<int>(rng() % 8);
        const SdpInstance inst = build_instance(k, n);
        std::vector<SymMatrix> qs;
        std::vector<double> x(static_cast<size_t>(inst.vars.total), 0.0);
        for (int b = 1; b <= k - 1; ++b) {
            qs.push_back(random_symmetric(n, rng));
            const std::vector<double> xb = pack(qs.back(), b, inst.vars);
            for (size_t i = 0; i < x.size(); ++i) x[i] += xb[i];
        }
        const std::vector<double> ax = inst.a_mat.multiply(x);
        const int pi = inst.indep_count;
        int row = 0;
        for (int b = 1; b <= k - 1; ++b, ++row)
            CHECK(ax[static_cast<size_t>(row)] ==
                  doctest::Approx(tr_i(qs[static_cast<size_t>(b - 1)], 0)).epsilon(1e-12));
        for (int i = 1; i <= pi; ++i, ++row)
            CHECK(ax[static_cast<size_t>(row)] ==
                  doctest::Approx(signed_trace(qs.front(), 1, i)).epsilon(1e-12));
        for (int i = 1; i <= pi; ++i, ++row)
            CHECK(ax[static_cast<size_t>(row)] ==
                  doctest::Approx(signed_trace(qs.back(), k, i)).epsilon(1e-12));
        for (int t = 2; t <= k - 1; ++t)
            for (int i = 1; i <= pi; ++i, ++row)
                CHECK(ax[static_cast<size_t>(row)] ==
                      doctest::Approx(
                          signed_trace(qs[static_cast<size_t>(t - 1)], t, i) -
                          signed_trace(qs[static_cast<size_t>(t - 2)], t, i))
                          .epsilon(1e-12));
    }
}

TEST_CASE("midpoint rows pin the self-mirrored index") {
    // odd N: the omitted rows are redundant, nothing to add
    CHECK(midpoint_rows(3, 7).a_mat.rows() == 0);

    // even N: one row per even interface index
    const MidpointRows m26 = midpoint_rows(2, 6);
    REQUIRE(m26.a_mat.rows() == 1);
    CHECK(m26.b_vec[0] == 0.0);
    std::mt19937 rng(29);
    const SymMatrix q = random_symmetric(6, rng);
    const VarIndex ctx(2, 6);
    const std::vector<double> ax = m26.a_mat.multiply(pack(q, 1, ctx));
    CHECK(ax[0] == doctest::Approx(signed_trace(q, 2, 3)).epsilon(1e-13));

    const MidpointRows m46 = midpoint_rows(4, 6);
    CHECK(m46.a_mat.rows() == 2);  // t = 2 and t = 4
}

TEST_CASE("instance dump format") {
    const SdpInstance inst = build_instance(2, 3);
    std::ostringstream os;
    write_instance_dump(inst, os);
    std::istringstream is(os.str());
    int k = 0, n = 0, rows = 0, cols = 0;
    long long nnz = 0;
    is >> k >> n >> rows >> cols >> nnz;
    CHECK(k == 2);
    CHECK(n == 3);
    CHECK(rows == 3);
    CHECK(cols == 6);
    CHECK(nnz == inst.a_mat.nnz());
    int count = 0;
    int r = 0, c = 0;
    double v = 0.0;
    while (is >> r >> c >> v) {
        CHECK(inst.a_mat.coeff(r, c) == v);
        ++count;
    }
    CHECK(count == nnz);
}

TEST_CASE("census csv") {
    CHECK(census_csv_header() == "k,N,rows,cols,nnz_a,nnz_b,nnz_g,fill_a,fill_g");
    const std::string row = census_csv_row(census(4, 250));
    CHECK(row.find("186750") != std::string::npos);
    CHECK(row.find("187500") != std::string::npos);
}
