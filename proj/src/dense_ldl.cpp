#include "ossdp/dense_ldl.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ossdp {

DenseLdl DenseLdl::factor(int n, std::vector<double> a, double static_reg,
                          std::span<const std::int8_t> reg_sign) {
    if (a.size() != static_cast<size_t>(n) * static_cast<size_t>(n))
        throw std::invalid_argument("DenseLdl: size mismatch");
    DenseLdl f;
    f.n_ = n;
    f.a_ = std::move(a);
    f.d_.assign(static_cast<size_t>(n), 0.0);
    double* A = f.a_.data();
    const size_t ns = static_cast<size_t>(n);

    double scale = 0.0;
    for (double v : f.a_) scale = std::max(scale, std::abs(v));
    const double tiny = std::max(scale, 1.0) * 1e-15;

    if (static_reg != 0.0) {
        if (reg_sign.size() != ns)
            throw std::invalid_argument("DenseLdl: reg_sign size mismatch");
        for (size_t i = 0; i < ns; ++i)
            A[i * ns + i] += static_reg * reg_sign[i];
    }

    constexpr int kPanel = 64;
    std::vector<double> w;  // scaled panel copy, (n - k0) x width
    for (int k0 = 0; k0 < n; k0 += kPanel) {
        const int k1 = std::min(k0 + kPanel, n);
        // factor the panel columns against each other
        for (int j = k0; j < k1; ++j) {
            double* cj = A + static_cast<size_t>(j) * ns;
            for (int p = k0; p < j; ++p) {
                const double c = f.d_[static_cast<size_t>(p)] * A[static_cast<size_t>(p) * ns + static_cast<size_t>(j)];
                if (c == 0.0) continue;
                const double* cp = A + static_cast<size_t>(p) * ns;
                for (int i = j; i < n; ++i) cj[i] -= c * cp[i];
            }
            double piv = cj[j];
            if (std::abs(piv) <= tiny) {
                f.perturbed_ = true;
                piv = piv >= 0.0 ? tiny : -tiny;
            }
            f.d_[static_cast<size_t>(j)] = piv;
            const double inv = 1.0 / piv;
            for (int i = j + 1; i < n; ++i) cj[i] *= inv;
        }
        if (k1 == n) break;
        // trailing update: A[k1:, k1:] -= L[k1:, panel] D L[k1:, panel]^T
        const int width = k1 - k0;
        const size_t lead = static_cast<size_t>(n - k1);
        w.resize(lead * static_cast<size_t>(width));
        for (int p = 0; p < width; ++p) {
            const double dp = f.d_[static_cast<size_t>(k0 + p)];
            const double* cp = A + static_cast<size_t>(k0 + p) * ns + static_cast<size_t>(k1);
            double* wp = w.data() + static_cast<size_t>(p) * lead;
            for (size_t i = 0; i < lead; ++i) wp[i] = dp * cp[i];
        }
        for (int jj = k1; jj < n; ++jj) {
            double* cj = A + static_cast<size_t>(jj) * ns;
            const size_t off = static_cast<size_t>(jj - k1);
            for (int p = 0; p < width; ++p) {
                const double ljp = A[static_cast<size_t>(k0 + p) * ns + static_cast<size_t>(jj)];
                if (ljp == 0.0) continue;
                const double* wp = w.data() + static_cast<size_t>(p) * lead + off;
                double* cji = cj + jj;
                const size_t len = static_cast<size_t>(n - jj);
                for (size_t i = 0; i < len; ++i) cji[i] -= ljp * wp[i];
            }
        }
    }
    return f;
}

std::vector<double> DenseLdl::solve_raw(std::span<const double> r) const {
    const size_t ns = static_cast<size_t>(n_);
    if (r.size() != ns)
        throw std::invalid_argument("DenseLdl::solve: dimension mismatch");
    std::vector<double> x(r.begin(), r.end());
    const double* A = a_.data();
    for (int j = 0; j < n_; ++j) {
        const double xj = x[static_cast<size_t>(j)];
        if (xj == 0.0) continue;
        const double* cj = A + static_cast<size_t>(j) * ns;
        for (int i = j + 1; i < n_; ++i) x[static_cast<size_t>(i)] -= cj[i] * xj;
    }
    for (int j = 0; j < n_; ++j) x[static_cast<size_t>(j)] /= d_[static_cast<size_t>(j)];
    for (int j = n_ - 1; j >= 0; --j) {
        const double* cj = A + static_cast<size_t>(j) * ns;
        double s = x[static_cast<size_t>(j)];
        for (int i = j + 1; i < n_; ++i) s -= cj[i] * x[static_cast<size_t>(i)];
        x[static_cast<size_t>(j)] = s;
    }
    return x;
}

}  // namespace ossdp
