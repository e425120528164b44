#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ossdp {

/// Dense LDL^T in the natural order, for the reference KKT path. No pivot
/// search: quasi-definite regularization is expected to keep pivots away
/// from zero; a pivot that still collapses is perturbed and flagged.
class DenseLdl {
public:
    /// a: full symmetric n x n, column-major; factored in place.
    static DenseLdl factor(int n, std::vector<double> a, double static_reg,
                           std::span<const std::int8_t> reg_sign);

    std::vector<double> solve_raw(std::span<const double> r) const;
    bool pivots_perturbed() const { return perturbed_; }

private:
    int n_ = 0;
    std::vector<double> a_;  // L below the diagonal
    std::vector<double> d_;
    bool perturbed_ = false;
};

}  // namespace ossdp
