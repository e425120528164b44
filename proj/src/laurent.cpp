#include "ossdp/laurent.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace ossdp {

LaurentPoly::LaurentPoly(std::vector<double> half_coeffs)
    : half_(std::move(half_coeffs)) {
    if (half_.empty())
        throw std::invalid_argument("LaurentPoly: need at least q_0");
    for (double q : half_)
        if (!std::isfinite(q))
            throw std::invalid_argument("LaurentPoly: non-finite coefficient");
}

double LaurentPoly::coeff(int i) const {
    const int a = std::abs(i);
    return a <= degree() ? half_[static_cast<size_t>(a)] : 0.0;
}

LaurentPoly hermite_kernel(int n) {
    if (n < 1)
        throw std::invalid_argument("hermite_kernel: N must be positive");
    std::vector<double> half(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        half[static_cast<size_t>(i)] = 1.0 - static_cast<double>(i) / n;
    return LaurentPoly(std::move(half));
}

double eval_on_circle(const LaurentPoly& p, double omega) {
    double v = p.coeff(0);
    for (int i = 1; i <= p.degree(); ++i)
        v += 2.0 * p.coeff(i) * std::cos(i * omega);
    return v;
}

double hermite_closed_form(int n, double omega) {
    if (n < 1)
        throw std::invalid_argument("hermite_closed_form: N must be positive");
    const double s = std::sin(0.5 * omega);
    if (s == 0.0)
        return static_cast<double>(n);  // removable singularity at z = 1
    const double r = std::sin(0.5 * n * omega) / s;
    return r * r / n;
}

double integral_mean(const LaurentPoly& p) { return p.coeff(0); }

std::vector<double> endpoint_values(const LaurentPoly& p, int n, int t) {
    if (n < 1)
        throw std::invalid_argument("endpoint_values: N must be positive");
    if (t < 0)
        throw std::invalid_argument("endpoint_values: t must be nonnegative");
    if (p.degree() > n - 1)
        throw std::invalid_argument("endpoint_values: degree exceeds N-1");
    const double pi = std::acos(-1.0);
    std::vector<double> vals(static_cast<size_t>(n));
    for (int m = 0; m < n; ++m) {
        const double omega = pi * (2 * m + t % 2) / n;
        vals[static_cast<size_t>(m)] = eval_on_circle(p, omega);
    }
    return vals;
}

}  // namespace ossdp
