#include "ossdp/verifier.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "ossdp/sdp_builder.hpp"

namespace ossdp {

LaurentPoly poly_from_matrix(const SymMatrix& q) {
    if (q.size() < 1)
        throw std::invalid_argument("poly_from_matrix: empty matrix");
    if (q.max_asymmetry() > 1e-12)
        throw std::invalid_argument("poly_from_matrix: matrix is not symmetric");
    std::vector<double> half(static_cast<size_t>(q.size()));
    for (int i = 0; i < q.size(); ++i) half[static_cast<size_t>(i)] = tr_i(q, i);
    return LaurentPoly(std::move(half));
}

VerifyReport verify(int k, int n, std::span<const SymMatrix> blocks,
                    double tolerance) {
    if (k < 1 || n < 1) throw std::invalid_argument("verify: bad dimensions");
    if (!(tolerance > 0.0)) throw std::invalid_argument("verify: bad tolerance");
    const bool with_boundary = blocks.size() == static_cast<size_t>(k) + 1;
    if (!with_boundary && blocks.size() != static_cast<size_t>(k) - 1)
        throw std::invalid_argument("verify: expected k-1 or k+1 blocks");
    for (const SymMatrix& q : blocks)
        if (q.size() != n)
            throw std::invalid_argument("verify: block dimension mismatch");

    VerifyReport rep;
    rep.tolerance = tolerance;

    // chain Q_0 .. Q_k with the prescribed boundary blocks
    std::vector<SymMatrix> chain;
    chain.reserve(static_cast<size_t>(k) + 1);
    chain.push_back(SymMatrix::ones_over_n(n));
    const size_t lo = with_boundary ? 1 : 0;
    const size_t hi = with_boundary ? blocks.size() - 1 : blocks.size();
    for (size_t i = lo; i < hi; ++i) chain.push_back(blocks[i]);
    chain.push_back(SymMatrix::identity_over_n(n));

    if (with_boundary) {
        double dev = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                dev = std::max(dev, std::abs(blocks[0](i, j) - chain[0](i, j)));
                dev = std::max(dev, std::abs(blocks[static_cast<size_t>(k)](i, j) -
                                             chain[static_cast<size_t>(k)](i, j)));
            }
        rep.boundary_error = dev;
    }

    // per-block spectral and trace conditions on the unknowns
    for (size_t b = 1; b + 1 < chain.size(); ++b) {
        const SymMatrix& q = chain[b];
        Eigen::Map<const Eigen::MatrixXd> qm(q.row_major().data(), n, n);
        const Eigen::MatrixXd qsym = 0.5 * (qm + qm.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(qsym,
                                                          Eigen::EigenvaluesOnly);
        rep.psd_margins.push_back(es.eigenvalues().minCoeff());
        rep.trace_errors.push_back(std::abs(tr_i(q, 0) - 1.0));
        rep.mean_errors.push_back(std::abs(integral_mean(poly_from_matrix(q)) - 1.0));
    }

    // interface conditions at every off-diagonal index, both as signed
    // traces and as endpoint values of the associated polynomials
    for (int t = 1; t <= k; ++t) {
        const SymMatrix& cur = chain[static_cast<size_t>(t)];
        const SymMatrix& prev = chain[static_cast<size_t>(t) - 1];
        for (int i = 1; i <= n - 1; ++i)
            rep.interface_error =
                std::max(rep.interface_error,
                         std::abs(signed_trace(cur, t, i) - signed_trace(prev, t, i)));
        const std::vector<double> vc = endpoint_values(poly_from_matrix(cur), n, t);
        const std::vector<double> vp = endpoint_values(poly_from_matrix(prev), n, t);
        for (int m = 0; m < n; ++m)
            rep.endpoint_error = std::max(
                rep.endpoint_error,
                std::abs(vc[static_cast<size_t>(m)] - vp[static_cast<size_t>(m)]));
    }

    bool ok = rep.interface_error <= tolerance &&
              rep.endpoint_error <= tolerance &&
              rep.boundary_error <= tolerance;
    for (double m : rep.psd_margins) ok = ok && m >= -tolerance;
    for (double e : rep.trace_errors) ok = ok && e <= tolerance;
    for (double e : rep.mean_errors) ok = ok && e <= tolerance;
    rep.passed = ok;
    return rep;
}

std::string verify_report_to_json(const VerifyReport& r) {
    nlohmann::json j;
    j["psd_margins"] = r.psd_margins;
    j["trace_errors"] = r.trace_errors;
    j["mean_errors"] = r.mean_errors;
    j["interface_error"] = r.interface_error;
    j["endpoint_error"] = r.endpoint_error;
    j["boundary_error"] = r.boundary_error;
    j["tolerance"] = r.tolerance;
    j["passed"] = r.passed;
    return j.dump(2);
}

}  // namespace ossdp
