#pragma once

// The (alpha, r) -> beta map and the eigenvalue-like scalars lambda_n that
// diagonalize the two-sided flux operator on the weighted Jacobi basis.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "fdespec/specfun.hpp"

namespace fdespec {

// r = sin(pi beta) / (sin(pi (alpha-beta)) + sin(pi beta)).
inline double r_from_beta(double alpha, double beta) {
    if (!(alpha > 1.0 && alpha < 2.0))
        throw std::domain_error("r_from_beta: alpha outside (1,2)");
    if (!(beta >= alpha - 1.0 && beta <= 1.0))
        throw std::domain_error("r_from_beta: beta outside [alpha-1, 1]");
    const double sb = std::sin(M_PI * beta);
    const double sab = std::sin(M_PI * (alpha - beta));
    return sb / (sab + sb);
}

// Unique root beta in [alpha-1, 1]; r decreases monotonically from 1 (at
// beta = alpha-1) to 0 (at beta = 1), so bisection brackets.  Converges to
// |interval| <= 1e-14.  r = 1 maps to the degenerate beta = alpha-1 (the
// kernel-term scale lambda_-1 vanishes there; the solver rejects it).
inline double beta_from_r(double alpha, double r) {
    if (!(alpha > 1.0 && alpha < 2.0))
        throw std::domain_error("beta_from_r: alpha outside (1,2)");
    if (!(r >= 0.0 && r <= 1.0))
        throw std::domain_error("beta_from_r: r outside [0,1]");
    if (r == 1.0) return alpha - 1.0;
    if (r == 0.0) return 1.0;
    double lo = alpha - 1.0, hi = 1.0;
    while (hi - lo > 1e-14) {
        const double mid = 0.5 * (lo + hi);
        if (r_from_beta(alpha, mid) > r)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

struct SpectralParams {
    double alpha{};
    double r{};
    double beta{};
    double lambda_minus1{};       // scale of the x*k(x) mode
    std::vector<double> lambdas;  // lambda_0 .. lambda_n_max
};

// lambda_n = sin(pi alpha)/(sin(pi(alpha-beta)) + sin(pi beta)) * Gamma(n+alpha)/n!.
// Built by the exact recurrence lambda_n = lambda_{n-1} (n-1+alpha)/n, which
// matches the Gamma-ratio form identically and never overflows for n <= 1e6.
// Note sin(pi alpha) < 0 on (1,2), so the lambda_n are negative; only |lambda_n|
// grows like (n+1)^(alpha-1).
inline SpectralParams build_params(double alpha, double r, int n_max) {
    SpectralParams sp;
    sp.alpha = alpha;
    sp.r = r;
    sp.beta = beta_from_r(alpha, r);
    const double sab = std::sin(M_PI * (alpha - sp.beta));
    const double sb = std::sin(M_PI * sp.beta);
    const double sa = std::sin(M_PI * alpha);
    sp.lambda_minus1 = -(1.0 - r) * std::exp(log_gamma(alpha)) * sa / sab;
    sp.lambdas.resize(static_cast<size_t>(n_max) + 1);
    sp.lambdas[0] = sa / (sab + sb) * std::exp(log_gamma(alpha));
    for (int n = 1; n <= n_max; ++n)
        sp.lambdas[static_cast<size_t>(n)] =
            sp.lambdas[static_cast<size_t>(n - 1)] * (n - 1.0 + alpha) / n;
    return sp;
}

// Null-space function k(x) = (1-x)^(alpha-beta-1) x^(beta-1).
inline double kernel_value(double alpha, double beta, double x) {
    return std::pow(1.0 - x, alpha - beta - 1.0) * std::pow(x, beta - 1.0);
}

}  // namespace fdespec
