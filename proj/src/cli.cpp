#include "ossdp/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ossdp/ip_solver.hpp"
#include "ossdp/sdp_builder.hpp"
#include "ossdp/verifier.hpp"

namespace ossdp::cli {

namespace {

struct RangeOpt {
    int lo = 0;
    int hi = 0;
    bool set = false;
};

void add_range_option(CLI::App* cmd, RangeOpt& range, bool required) {
    auto* opt = cmd->add_option_function<std::string>(
        "--n-range",
        [&range](const std::string& s) {
            const auto colon = s.find(':');
            if (colon == std::string::npos)
                throw CLI::ValidationError("--n-range", "expected lo:hi");
            range.lo = std::stoi(s.substr(0, colon));
            range.hi = std::stoi(s.substr(colon + 1));
            range.set = true;
            if (range.lo < 2 || range.hi < range.lo)
                throw CLI::ValidationError("--n-range", "need 2 <= lo <= hi");
        },
        "List-size range lo:hi");
    if (required) opt->required();
}

void write_or_print(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text << '\n';
        return;
    }
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open output file: " + path);
    os << text << '\n';
}

int exit_code(SolveStatus st) {
    switch (st) {
        case SolveStatus::feasible: return 0;
        case SolveStatus::infeasible: return 1;
        default: return 2;
    }
}

}  // namespace

int run(std::span<const std::string> args) {
    CLI::App app{"Feasibility engine for the ordered-search semidefinite "
                 "program S(k,N)"};
    app.require_subcommand(1);

    int k = 2;
    int n = 2;
    std::string out_path;
    RangeOpt range;
    SolverConfig cfg;
    std::string kkt_name = "sparse";
    bool speculative = false;
    std::string input_path;

    auto add_solver_opts = [&](CLI::App* cmd) {
        cmd->add_option("--tol-gap", cfg.tol_gap, "Complementarity tolerance")
            ->capture_default_str();
        cmd->add_option("--tol-eq", cfg.tol_eq, "Equality residual tolerance")
            ->capture_default_str();
        cmd->add_option("--tol-margin", cfg.tol_margin,
                        "Feasibility decision band")
            ->capture_default_str();
        cmd->add_option("--max-iter", cfg.max_iter, "Iteration limit")
            ->capture_default_str();
        cmd->add_option("--kkt", kkt_name, "KKT mode: sparse or dense")
            ->check(CLI::IsMember({"sparse", "dense"}))
            ->capture_default_str();
        cmd->add_option("--budget-cells", cfg.budget_cells,
                        "Dense-path KKT cell budget")
            ->capture_default_str();
    };

    CLI::App* c_build = app.add_subcommand("build", "Write the instance dump");
    c_build->add_option("-k", k, "Query count")->required();
    c_build->add_option("-N", n, "List size")->required();
    c_build->add_option("-o", out_path, "Output path (default stdout)");

    CLI::App* c_solve = app.add_subcommand(
        "solve", "Decide feasibility of S(k,N); writes the solution JSON");
    c_solve->add_option("-k", k, "Query count")->required();
    c_solve->add_option("-N", n, "List size")->required();
    c_solve->add_option("-o", out_path, "Output path (default stdout)");
    add_solver_opts(c_solve);

    CLI::App* c_verify = app.add_subcommand(
        "verify", "Check a solution JSON against the full conditions");
    c_verify->add_option("input", input_path, "Solution JSON path")->required();
    c_verify->add_option("--tol-margin", cfg.tol_margin, "Verification tolerance")
        ->capture_default_str();
    c_verify->add_option("-o", out_path, "Report path (default stdout)");

    CLI::App* c_census = app.add_subcommand(
        "census", "Sparsity accounting as CSV over N or an N-range");
    c_census->add_option("-k", k, "Query count")->required();
    c_census->add_option("-N", n, "Single list size");
    add_range_option(c_census, range, false);
    c_census->add_option("-o", out_path, "Output path (default stdout)");

    CLI::App* c_search = app.add_subcommand(
        "search", "Largest feasible N in a range by bisection");
    c_search->add_option("-k", k, "Query count")->required();
    add_range_option(c_search, range, true);
    c_search->add_flag("--speculative", speculative,
                       "Probe the likely next midpoint concurrently");
    add_solver_opts(c_search);

    CLI::App* c_bench = app.add_subcommand(
        "bench", "Run the sparse and dense paths on one instance and compare");
    c_bench->add_option("-k", k, "Query count")->required();
    c_bench->add_option("-N", n, "List size")->required();
    add_solver_opts(c_bench);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help() << '\n';
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << '\n';
        return 2;
    }

    cfg.kkt_mode = kkt_name == "dense" ? KktMode::dense : KktMode::sparse;

    try {
        if (c_build->parsed()) {
            const SdpInstance inst = build_instance(k, n);
            std::ostringstream os;
            write_instance_dump(inst, os);
            write_or_print(out_path, os.str());
            return 0;
        }
        if (c_solve->parsed()) {
            const SdpInstance inst = build_instance(k, n);
            const SolveOutcome out = solve(inst, cfg);
            write_or_print(out_path, solution_to_json(k, n, out, cfg));
            if (out.status == SolveStatus::indeterminate && !out.diagnostic.empty())
                std::cerr << "indeterminate: " << out.diagnostic << '\n';
            return exit_code(out.status);
        }
        if (c_verify->parsed()) {
            std::ifstream is(input_path);
            if (!is) throw std::runtime_error("cannot open " + input_path);
            const Solution sol = solution_from_json(is);
            const VerifyReport rep =
                verify(sol.k, sol.n, sol.blocks, cfg.tol_margin);
            write_or_print(out_path, verify_report_to_json(rep));
            return rep.passed ? 0 : 1;
        }
        if (c_census->parsed()) {
            std::ostringstream os;
            os << census_csv_header() << '\n';
            if (range.set) {
                for (int nn = range.lo; nn <= range.hi; ++nn)
                    os << census_csv_row(census(k, nn)) << '\n';
            } else {
                os << census_csv_row(census(k, n)) << '\n';
            }
            std::string text = os.str();
            if (!text.empty() && text.back() == '\n') text.pop_back();
            write_or_print(out_path, text);
            return 0;
        }
        if (c_search->parsed()) {
            const SearchResult res =
                search_max_feasible_n(k, range.lo, range.hi, cfg, speculative);
            for (const SearchProbe& p : res.probes)
                std::cout << "probe N=" << p.n << " -> " << to_string(p.status)
                          << " (margin " << p.margin << ")\n";
            if (res.aborted) {
                std::cerr << "search aborted: " << res.diagnostic << '\n';
                return 2;
            }
            if (res.max_feasible)
                std::cout << "largest feasible N in [" << range.lo << ", "
                          << range.hi << "]: " << *res.max_feasible << '\n';
            else
                std::cout << "no feasible N in [" << range.lo << ", " << range.hi
                          << "]\n";
            return 0;
        }
        if (c_bench->parsed()) {
            const SdpInstance inst = build_instance(k, n);
            SolverConfig sparse_cfg = cfg;
            sparse_cfg.kkt_mode = KktMode::sparse;
            const SolveOutcome sp = solve(inst, sparse_cfg);
            const SolveOutcome dn = solve_dense_reference(inst, cfg);
            std::cout << "sparse: " << sp.wall_time << " s (" << to_string(sp.status)
                      << ", margin " << sp.margin << ", " << sp.iterations
                      << " iterations)\n";
            std::cout << "dense:  " << dn.wall_time << " s (" << to_string(dn.status)
                      << ", margin " << dn.margin << ", " << dn.iterations
                      << " iterations)\n";
            std::cout << "ratio:  dense/sparse = " << dn.wall_time / sp.wall_time
                      << '\n';
            return 0;
        }
    } catch (const BudgetExceededError& e) {
        std::cerr << "refused: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}

}  // namespace ossdp::cli
