#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ossdp/sdp_builder.hpp"
#include "ossdp/sym_matrix.hpp"

namespace ossdp {

enum class KktMode { sparse, dense };
enum class SolveStatus { feasible, infeasible, indeterminate };

const char* to_string(SolveStatus s);

struct SolverConfig {
    double tol_gap = 1e-8;     // complementarity tolerance
    double tol_eq = 1e-8;      // equality residual tolerance
    double tol_margin = 1e-7;  // feasibility decision band
    int max_iter = 200;
    KktMode kkt_mode = KktMode::sparse;
    double budget_cells = 1e8;  // dense-path KKT cell budget
};

class BudgetExceededError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Result of the margin program "maximize t subject to the equality system
/// and every block >= t I". The sign of the optimal t decides feasibility.
struct SolveOutcome {
    SolveStatus status = SolveStatus::indeterminate;
    double margin = 0.0;
    std::vector<SymMatrix> blocks;  // k-1 unknowns, present when converged
    int iterations = 0;
    double eq_residual = 0.0;       // max |A x - b| over the instance rows
    double wall_time = 0.0;         // seconds
    std::string diagnostic;         // set for indeterminate outcomes
};

SolveOutcome solve(const SdpInstance& inst, const SolverConfig& cfg = {});

/// Same contract with the KKT system held and factored densely; the
/// correctness oracle and timing baseline. Refuses instances whose dense
/// KKT would exceed cfg.budget_cells cells.
SolveOutcome solve_dense_reference(const SdpInstance& inst,
                                   SolverConfig cfg = {});

struct SearchProbe {
    int n = 0;
    SolveStatus status = SolveStatus::indeterminate;
    double margin = 0.0;
};

struct SearchResult {
    std::optional<int> max_feasible;  // empty when no feasible N in range
    std::vector<SearchProbe> probes;
    bool aborted = false;  // an indeterminate probe stopped the search
    std::string diagnostic;
};

/// Binary search for the largest feasible N in [n_lo, n_hi] at fixed k,
/// assuming feasibility is downward monotone in N. Any indeterminate probe
/// aborts the search. With speculative = true the likely next probe runs
/// concurrently with the current one.
SearchResult search_max_feasible_n(int k, int n_lo, int n_hi,
                                   const SolverConfig& cfg = {},
                                   bool speculative = false);

/// Query-rate coefficient k / log2(N) certified by a feasible (k, N).
double rate(int k, int n);

std::string solution_to_json(int k, int n, const SolveOutcome& out,
                             const SolverConfig& cfg);

struct Solution {
    int k = 0;
    int n = 0;
    SolveStatus status = SolveStatus::indeterminate;
    double margin = 0.0;
    int iterations = 0;
    std::vector<SymMatrix> blocks;
};
Solution solution_from_json(std::istream& is);

}  // namespace ossdp
