#pragma once

#include <span>
#include <string>
#include <vector>

#include "ossdp/laurent.hpp"
#include "ossdp/sym_matrix.hpp"

namespace ossdp {

/// Certificate check results. Every condition is re-derived from the
/// matrices themselves; nothing is shared with the instance encoder, so an
/// encoder defect (including the omitted midpoint row) is caught here.
struct VerifyReport {
    std::vector<double> psd_margins;    // smallest eigenvalue per block
    std::vector<double> trace_errors;   // |Tr Q_t - 1| per block
    std::vector<double> mean_errors;    // |q_0 - 1| via the polynomial route
    double interface_error = 0.0;       // max over t and all i = 1..N-1
    double endpoint_error = 0.0;        // max over t and the N evaluation roots
    double boundary_error = 0.0;        // start/end block deviation, when given
    double tolerance = 0.0;
    bool passed = false;
};

/// Laurent polynomial of a symmetric matrix: q_i equals the trace along the
/// i-th off-diagonal. Rejects inputs whose asymmetry exceeds 1e-12.
LaurentPoly poly_from_matrix(const SymMatrix& q);

/// Full certificate check for (k, N). Accepts either the k-1 unknown blocks
/// (the all-ones/N start and identity/N end blocks are supplied internally)
/// or all k+1 blocks, in which case the boundary blocks are checked too.
VerifyReport verify(int k, int n, std::span<const SymMatrix> blocks,
                    double tolerance);

std::string verify_report_to_json(const VerifyReport& r);

}  // namespace ossdp
