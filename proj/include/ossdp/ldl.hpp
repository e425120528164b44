#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "ossdp/sparse_matrix.hpp"

namespace ossdp {

class SingularMatrixError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LdlOptions {
    /// Bunch-Kaufman style acceptance threshold in (0, 0.5]: a 1x1 pivot d is
    /// taken when |d| >= pivot_tol * (largest magnitude below it).
    double pivot_tol = 0.01;
    /// Elimination order (new position -> original index). Empty selects a
    /// minimum-degree ordering of the pattern.
    std::vector<int> ordering;
    /// Static regularization added to the diagonal: reg_sign[i] * static_reg
    /// on original index i. Used for quasi-definite systems; refinement in
    /// solve() targets the unregularized matrix.
    double static_reg = 0.0;
    std::vector<std::int8_t> reg_sign;
    /// Iterative refinement passes inside solve().
    int refine_steps = 2;
};

/// LDL^T factorization P K P^T = L D L^T of a structurally symmetric sparse
/// matrix, with 1x1 and adjacent 2x2 pivots. D is block diagonal: diagonal()
/// holds the 1x1 values and the diagonal of 2x2 blocks; subdiagonal() holds
/// the coupling value of each 2x2 block at the index of its first column.
class SymFactor {
public:
    struct Inertia {
        int positives = 0;
        int negatives = 0;
        int zeros = 0;
    };

    const std::vector<int>& permutation() const { return perm_; }
    /// Strictly lower triangular part of L (unit diagonal implied).
    const SparseMatrix& lower_factor() const { return lower_; }
    const std::vector<double>& diagonal() const { return d_; }
    const std::vector<double>& subdiagonal() const { return e_; }
    Inertia inertia() const { return inertia_; }
    /// True when a pivot had to be perturbed to continue the factorization.
    bool pivots_perturbed() const { return perturbed_; }

    /// Solves K x = r for the matrix given to ldl_factor, refining against
    /// the stored copy of K.
    std::vector<double> solve(std::span<const double> r) const;

    /// Single factor application without refinement.
    std::vector<double> solve_raw(std::span<const double> r) const;

private:
    friend SymFactor ldl_factor(const SparseMatrix&, const LdlOptions&);

    std::vector<int> perm_;
    std::vector<int> iperm_;
    SparseMatrix lower_;
    std::vector<double> d_;
    std::vector<double> e_;
    std::vector<std::uint8_t> pair_start_;
    Inertia inertia_;
    bool perturbed_ = false;
    int refine_steps_ = 2;
    std::shared_ptr<const SparseMatrix> original_;
};

SymFactor ldl_factor(const SparseMatrix& k_mat, const LdlOptions& opts = {});

inline SymFactor ldl_factor(const SparseMatrix& k_mat, double pivot_tol) {
    LdlOptions opts;
    opts.pivot_tol = pivot_tol;
    return ldl_factor(k_mat, opts);
}

/// Fill-reducing ordering of the pattern of K (minimum degree on the
/// quotient graph, with element absorption).
std::vector<int> min_degree_ordering(const SparseMatrix& k_mat);

}  // namespace ossdp
