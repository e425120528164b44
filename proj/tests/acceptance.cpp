// Acceptance suite: runs every headline requirement end to end and prints
// one PASS/FAIL line per criterion. Exit code is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "ossdp/ip_solver.hpp"
#include "ossdp/laurent.hpp"
#include "ossdp/sdp_builder.hpp"
#include "ossdp/verifier.hpp"

using namespace ossdp;

namespace {

int failures = 0;

void report(int criterion, bool ok, const std::string& detail) {
    std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion,
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

int main() {
    // ------------------------------------------------------------------
    // 1. known frontier at k = 2: S(2,6) feasible, S(2,7) infeasible
    const SolveOutcome s26 = solve(build_instance(2, 6));
    const SolveOutcome s27 = solve(build_instance(2, 7));
    report(1,
           s26.status == SolveStatus::feasible &&
               s27.status == SolveStatus::infeasible && s26.wall_time < 5.0 &&
               s27.wall_time < 5.0,
           "S(2,6) " + std::string(to_string(s26.status)) + " in " +
               fmt(s26.wall_time) + " s, S(2,7) " + to_string(s27.status) +
               " in " + fmt(s27.wall_time) + " s (margins " + fmt(s26.margin) +
               ", " + fmt(s27.margin) + ")");

    // ------------------------------------------------------------------
    // 2. known frontier at k = 3: S(3,56) feasible, S(3,57) infeasible
    const SolveOutcome s356 = solve(build_instance(3, 56));
    const SolveOutcome s357 = solve(build_instance(3, 57));
    report(2,
           s356.status == SolveStatus::feasible &&
               s357.status == SolveStatus::infeasible &&
               s356.wall_time < 600.0 && s357.wall_time < 600.0,
           "S(3,56) " + std::string(to_string(s356.status)) + " in " +
               fmt(s356.wall_time) + " s, S(3,57) " + to_string(s357.status) +
               " in " + fmt(s357.wall_time) + " s (margins " +
               fmt(s356.margin) + ", " + fmt(s357.margin) + ")");

    // ------------------------------------------------------------------
    // 3. worked example: the (2,3) boundary row and the returned block
    {
        const SdpInstance inst = build_instance(2, 3);
        const bool row_exact = inst.a_mat.coeff(1, 1) == 1.0 &&
                               inst.a_mat.coeff(1, 4) == 1.0 &&
                               inst.a_mat.coeff(1, 2) == -1.0 &&
                               inst.a_mat.nnz() == 12 &&
                               inst.b_vec[1] == 1.0 / 3.0;
        const SolveOutcome out = solve(inst);
        bool sol_ok = out.status == SolveStatus::feasible && !out.blocks.empty();
        double resid = 1.0;
        if (sol_ok) {
            const SymMatrix& q = out.blocks[0];
            resid = std::abs(q(1, 0) + q(2, 1) - q(2, 0) - 1.0 / 3.0);
            sol_ok = resid <= 1e-8;
        }
        report(3, row_exact && sol_ok,
               "boundary row coefficients exact, block residual " + fmt(resid));
    }

    // ------------------------------------------------------------------
    // 4. sparsity census: headline counts and exact agreement with
    //    constructed instances
    {
        const CensusReport c = census(4, 250);
        bool ok = c.nnz_a == 186750 && c.nnz_g == 187500 &&
                  c.dense_cells_g == 5882812500LL;
        std::string first_mismatch;
        for (int k = 2; k <= 4 && ok; ++k)
            for (int n = 2; n <= 40 && ok; ++n) {
                const CensusReport cc = census(k, n);
                const SdpInstance inst = build_instance(k, n);
                std::int64_t nnzb = 0;
                for (double v : inst.b_vec) nnzb += v != 0.0 ? 1 : 0;
                std::int64_t nnzg = 0;
                for (int b = 1; b <= k - 1; ++b)
                    nnzg += psd_block_encoding(inst, b).nnz();
                if (cc.rows != inst.a_mat.rows() || cc.cols != inst.a_mat.cols() ||
                    cc.nnz_a != inst.a_mat.nnz() || cc.nnz_b != nnzb ||
                    cc.nnz_g != nnzg) {
                    ok = false;
                    first_mismatch = " first mismatch at (" + std::to_string(k) +
                                     "," + std::to_string(n) + ")";
                }
            }
        report(4, ok,
               "census(4,250): nnz_a=" + std::to_string(c.nnz_a) +
                   " nnz_g=" + std::to_string(c.nnz_g) +
                   " dense_cells_g=" + std::to_string(c.dense_cells_g) +
                   "; measured counts match for k in 2..4, N in 2..40" +
                   first_mismatch);
    }

    // ------------------------------------------------------------------
    // 5. kernel identity between the coefficient sum and the closed form
    {
        std::mt19937 rng(2026);
        std::uniform_real_distribution<double> uw(-10.0, 10.0);
        double worst = 0.0;
        bool mean_exact = true;
        for (int n = 1; n <= 64; ++n) {
            const LaurentPoly h = hermite_kernel(n);
            mean_exact = mean_exact && integral_mean(h) == 1.0;
            for (int trial = 0; trial < 100; ++trial) {
                const double w = uw(rng);
                worst = std::max(worst, std::abs(eval_on_circle(h, w) -
                                                 hermite_closed_form(n, w)));
            }
        }
        report(5, worst <= 1e-10 && mean_exact,
               "max |sum - closed form| = " + fmt(worst) +
                   ", circle mean exactly 1 for every N <= 64");
    }

    // ------------------------------------------------------------------
    // 6. sparse and dense KKT paths agree on status and margin
    std::vector<SolveOutcome> feasible_pool;
    std::vector<std::pair<int, int>> feasible_dims;
    feasible_pool.push_back(s26);
    feasible_dims.push_back({2, 6});
    feasible_pool.push_back(s356);
    feasible_dims.push_back({3, 56});
    {
        bool ok = true;
        double worst = 0.0;
        std::string detail;
        for (int k = 2; k <= 3 && ok; ++k)
            for (int n = 2; n <= 20 && ok; ++n) {
                const SdpInstance inst = build_instance(k, n);
                const SolveOutcome sp = solve(inst);
                const SolveOutcome dn = solve_dense_reference(inst);
                worst = std::max(worst, std::abs(sp.margin - dn.margin));
                if (sp.status != dn.status || std::abs(sp.margin - dn.margin) > 1e-6) {
                    ok = false;
                    detail = " disagreement at (" + std::to_string(k) + "," +
                             std::to_string(n) + ")";
                }
                if (sp.status == SolveStatus::feasible) {
                    feasible_pool.push_back(sp);
                    feasible_dims.push_back({k, n});
                }
            }
        report(6, ok,
               "k in {2,3}, N in 2..20: statuses agree, max margin gap " +
                   fmt(worst) + detail);
    }

    // ------------------------------------------------------------------
    // 7. verifier independence: every feasible solution passes the full
    //    check (all off-diagonal indices), a perturbed one fails
    {
        bool all_pass = true;
        std::string detail;
        for (size_t i = 0; i < feasible_pool.size(); ++i) {
            const auto [k, n] = feasible_dims[i];
            const VerifyReport rep = verify(k, n, feasible_pool[i].blocks, 1e-7);
            if (!rep.passed) {
                all_pass = false;
                detail = " verify failed at (" + std::to_string(k) + "," +
                         std::to_string(n) + ") interface " +
                         fmt(rep.interface_error) + " endpoint " +
                         fmt(rep.endpoint_error);
                break;
            }
        }
        // perturbing one off-diagonal coefficient must break the certificate
        std::vector<SymMatrix> tampered = s26.blocks;
        tampered[0].set(1, 0, tampered[0](1, 0) + 1e-3);
        const bool caught = !verify(2, 6, tampered, 1e-7).passed;
        report(7, all_pass && caught,
               std::to_string(feasible_pool.size()) +
                   " feasible certificates pass at 1e-7; 1e-3 off-diagonal "
                   "perturbation rejected" +
                   detail);
    }

    // ------------------------------------------------------------------
    // 8. the sparse path beats the dense path on S(3,56)
    {
        const SolveOutcome dense356 = solve_dense_reference(build_instance(3, 56));
        const bool ok = dense356.status == s356.status &&
                        s356.wall_time < dense356.wall_time;
        report(8, ok,
               "S(3,56) sparse " + fmt(s356.wall_time) + " s vs dense " +
                   fmt(dense356.wall_time) + " s (ratio " +
                   fmt(dense356.wall_time / std::max(s356.wall_time, 1e-9)) +
                   ")");
    }

    // ------------------------------------------------------------------
    // 9. query-rate arithmetic
    {
        const double r4 = rate(4, 605);
        const double r3 = rate(3, 56);
        report(9, std::abs(r4 - 0.4329) <= 1e-4 && std::abs(r3 - 0.5166) <= 1e-4,
               "rate(4,605) = " + fmt(r4) + ", rate(3,56) = " + fmt(r3));
    }

    if (failures == 0)
        std::printf("all acceptance criteria passed\n");
    else
        std::printf("%d criterion(s) failed\n", failures);
    return failures;
}
