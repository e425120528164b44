#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

#include "ossdp/ip_solver.hpp"
#include "ossdp/sdp_builder.hpp"
#include "ossdp/verifier.hpp"

using namespace ossdp;

namespace {

double min_eig(const SymMatrix& q) {
    Eigen::Map<const Eigen::MatrixXd> m(q.row_major().data(), q.size(), q.size());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("the (2,3) margin program") {
    const SdpInstance inst = build_instance(2, 3);
    const SolveOutcome out = solve(inst);
    CHECK(out.status == SolveStatus::feasible);
    // unique admissible polynomial: value 1/3 at the minimum over the
    // circle, so the best margin is exactly 1/9
    CHECK(out.margin == doctest::Approx(1.0 / 9.0).epsilon(1e-6));
    REQUIRE(out.blocks.size() == 1);
    const SymMatrix& q = out.blocks[0];
    // the worked boundary relation between the three off-diagonal entries
    CHECK(q(1, 0) + q(2, 1) - q(2, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-8));
    CHECK(out.eq_residual <= 1e-8);
    CHECK(min_eig(q) >= out.margin - 1e-7);

    // the hand-built point is feasible and diagonally dominant, so the
    // optimum cannot be negative
    SymMatrix hand(3);
    hand.set(0, 0, 1.0 / 3.0);
    hand.set(1, 1, 1.0 / 3.0);
    hand.set(2, 2, 1.0 / 3.0);
    hand.set(1, 0, 1.0 / 12.0);
    hand.set(2, 1, 1.0 / 12.0);
    hand.set(2, 0, -1.0 / 6.0);
    CHECK(signed_trace(hand, 1, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(signed_trace(hand, 2, 1) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(min_eig(hand) >= 0.0);
    CHECK(out.margin >= -1e-9);
}

TEST_CASE("known frontier for two queries") {
    CHECK(solve(build_instance(2, 6)).status == SolveStatus::feasible);
    CHECK(solve(build_instance(2, 7)).status == SolveStatus::infeasible);
}

TEST_CASE("margins decrease in N and cross between 6 and 7") {
    double prev = std::numeric_limits<double>::infinity();
    for (int n = 3; n <= 8; ++n) {
        const SolveOutcome out = solve(build_instance(2, n));
        CHECK(out.margin < prev);
        if (n <= 6) CHECK(out.margin > 1e-7);
        if (n >= 7) CHECK(out.margin < -1e-7);
        prev = out.margin;
    }
}

TEST_CASE("sparse and dense paths agree") {
    for (int k : {2, 3}) {
        for (int n : {3, 4, 6, 9, 10}) {
            const SdpInstance inst = build_instance(k, n);
            const SolveOutcome sp = solve(inst);
            const SolveOutcome dn = solve_dense_reference(inst);
            CHECK(sp.status == dn.status);
            CHECK(std::abs(sp.margin - dn.margin) <= 1e-6);
        }
    }
}

TEST_CASE("feasible solutions pass the full verifier") {
    for (int n : {3, 4, 5, 6}) {
        const SolveOutcome out = solve(build_instance(2, n));
        if (out.status != SolveStatus::feasible) continue;
        const VerifyReport rep = verify(2, n, out.blocks, 1e-7);
        CHECK(rep.passed);
    }
    const SolveOutcome o38 = solve(build_instance(3, 8));
    REQUIRE(o38.status == SolveStatus::feasible);
    CHECK(verify(3, 8, o38.blocks, 1e-7).passed);
}

TEST_CASE("determinism") {
    const SdpInstance inst = build_instance(2, 6);
    const SolveOutcome a = solve(inst);
    const SolveOutcome b = solve(inst);
    CHECK(a.iterations == b.iterations);
    CHECK(a.status == b.status);
    CHECK(a.margin == b.margin);  // bitwise
}

TEST_CASE("budget refusal on the dense path") {
    const SdpInstance inst = build_instance(4, 250);
    CHECK_THROWS_AS(solve_dense_reference(inst), BudgetExceededError);
    SolverConfig cfg;
    cfg.kkt_mode = KktMode::dense;
    CHECK_THROWS_AS(solve(inst, cfg), BudgetExceededError);
}

TEST_CASE("search over a range of list sizes") {
    const SearchResult res = search_max_feasible_n(2, 2, 16);
    REQUIRE(res.max_feasible.has_value());
    CHECK(*res.max_feasible == 6);
    CHECK(!res.aborted);
    CHECK(res.probes.front().n == 2);

    const SearchResult none = search_max_feasible_n(2, 7, 16);
    CHECK(!none.max_feasible.has_value());
    CHECK(!none.aborted);
    REQUIRE(none.probes.size() == 1);
    CHECK(none.probes[0].status == SolveStatus::infeasible);

    CHECK_THROWS_AS(search_max_feasible_n(2, 10, 5), std::invalid_argument);
}

TEST_CASE("speculative search finds the same answer") {
    const SearchResult seq = search_max_feasible_n(2, 2, 12);
    const SearchResult spec = search_max_feasible_n(2, 2, 12, SolverConfig{}, true);
    REQUIRE(seq.max_feasible.has_value());
    REQUIRE(spec.max_feasible.has_value());
    CHECK(*seq.max_feasible == *spec.max_feasible);
}

TEST_CASE("query rate") {
    CHECK(rate(1, 2) == 1.0);
    CHECK(rate(4, 605) == doctest::Approx(0.4329).epsilon(2.5e-4));
    CHECK(rate(3, 56) == doctest::Approx(0.5166).epsilon(2e-4));
    CHECK_THROWS_AS(rate(2, 1), std::invalid_argument);
}

TEST_CASE("solution json round trip") {
    const SdpInstance inst = build_instance(2, 4);
    const SolverConfig cfg;
    const SolveOutcome out = solve(inst, cfg);
    const std::string text = solution_to_json(2, 4, out, cfg);
    std::istringstream is(text);
    const Solution sol = solution_from_json(is);
    CHECK(sol.k == 2);
    CHECK(sol.n == 4);
    CHECK(sol.status == out.status);
    CHECK(sol.margin == out.margin);
    REQUIRE(sol.blocks.size() == out.blocks.size());
    for (size_t b = 0; b < sol.blocks.size(); ++b)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                CHECK(sol.blocks[b](i, j) == out.blocks[b](i, j));
}
