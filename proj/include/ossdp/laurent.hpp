#pragma once

#include <vector>

namespace ossdp {

/// Real symmetric Laurent polynomial q(z) = sum_{i=-D..D} q_i z^i with
/// q_i = q_{-i}. Only the half i = 0..D is stored; the mirror half is
/// implied, so an asymmetric polynomial is not representable.
class LaurentPoly {
public:
    /// Builds from the coefficients for i = 0..D.
    explicit LaurentPoly(std::vector<double> half_coeffs);

    int degree() const { return static_cast<int>(half_.size()) - 1; }

    /// Coefficient q_i for any signed i; zero outside [-D, D].
    double coeff(int i) const;

    /// The stored half, index i = 0..D.
    const std::vector<double>& half_coeffs() const { return half_; }

private:
    std::vector<double> half_;
};

/// Triangular-weight kernel of degree N-1 with q_i = 1 - |i|/N.
LaurentPoly hermite_kernel(int n);

/// Value at z = e^{i omega}: evaluates q_0 + 2 sum_{i>=1} q_i cos(i omega),
/// which is the real value of the polynomial on the unit circle.
double eval_on_circle(const LaurentPoly& p, double omega);

/// Closed form of hermite_kernel(N) on the circle,
/// (1/N) |sum_{x=0..N-1} e^{i omega x}|^2. The singularity at omega = 0
/// (mod 2pi) is removable; the limit value N is returned there.
double hermite_closed_form(int n, double omega);

/// Mean of p over the unit circle, which is exactly q_0.
double integral_mean(const LaurentPoly& p);

/// Values of p at the N solutions of z^N = (-1)^t, i.e. at angles
/// omega_m = pi (2m + t mod 2) / N for m = 0..N-1, in order of increasing m.
/// Requires degree(p) <= N-1.
std::vector<double> endpoint_values(const LaurentPoly& p, int n, int t);

}  // namespace ossdp
