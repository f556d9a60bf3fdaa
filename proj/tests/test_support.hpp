#pragma once

// Shared oracles for the test suites.  Everything here is deliberately
// independent of the library's production paths: the binomial-sum Jacobi
// evaluation, brute-force integration, finite differences, and Parseval
// tail sums are the reference implementations the fast code is checked
// against.

#include <cmath>
#include <vector>

#include "fdespec/fdespec.hpp"

namespace testsupport {

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::abs(want);
}

// Explicit binomial-sum form of the Jacobi polynomial (the definition),
// usable for small n only; the production code uses the recurrence.
//   P_n^(a,b)(x) = sum_m 2^-n C(n+a, m) C(n+b, n-m) (x-1)^(n-m) (x+1)^m
inline double jacobi_G_binomial_sum(int n, fdespec::JacobiParams p, double t) {
    const double x = 2.0 * t - 1.0;
    auto gbinom = [](double top, int k) {
        // C(top, k) with real top, integer k >= 0
        double v = 1.0;
        for (int j = 1; j <= k; ++j) v *= (top - (k - j)) / j;
        return v;
    };
    double sum = 0.0;
    for (int m = 0; m <= n; ++m)
        sum += gbinom(n + p.a, m) * gbinom(n + p.b, n - m)
               * std::pow(x - 1.0, n - m) * std::pow(x + 1.0, m);
    return sum / std::pow(2.0, n);
}

// Composite Gauss-Legendre over [lo, hi], for smooth integrands; the
// adaptive-free brute-force integrator.
template <class F>
inline double integrate_panels(F&& f, double lo, double hi, int panels = 12,
                               int order = 32) {
    const fdespec::QuadratureRule leg = fdespec::gauss_jacobi(order, {0.0, 0.0});
    const double width = (hi - lo) / panels;
    double total = 0.0;
    for (int k = 0; k < panels; ++k) {
        const double a = lo + k * width;
        total += width * fdespec::integrate(leg, [&](double t) { return f(a + width * t); });
    }
    return total;
}

template <class F>
inline double centered_diff(F&& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Parseval tails: the exact weighted-norm truncation errors expressed through
// the expansion coefficients of a reference solution with large N.
inline double parseval_q_tail(const fdespec::SpectralSolution& ref, int from) {
    const double a = ref.params.alpha - ref.params.beta, b = ref.params.beta;
    double sum = 0.0;
    for (int i = ref.N - 1; i >= from; --i)
        sum += ref.c[static_cast<size_t>(i)] * ref.c[static_cast<size_t>(i)]
               * fdespec::jacobi_norm_sq(i, {a, b});
    return std::sqrt(sum);
}

inline double parseval_u_tail(const fdespec::SpectralSolution& ref, int from) {
    const double a = ref.params.alpha - ref.params.beta + 1.0, b = ref.params.beta + 1.0;
    double sum = 0.0;
    from = std::max(from, 1);
    for (int i = ref.N - 1; i >= from; --i)
        sum += ref.c[static_cast<size_t>(i)] / i * ref.c[static_cast<size_t>(i)] / i
               * fdespec::jacobi_norm_sq(i - 1, {a, b});
    return std::sqrt(sum);
}

// Monomial moments of rho^(a,b): m_k = B(b+k+1, a+1), by the stable upward
// recursion m_k = m_{k-1} (b+k) / (a+b+k+1).
inline std::vector<double> rho_monomial_moments(fdespec::JacobiParams p, int kmax) {
    std::vector<double> m(static_cast<size_t>(kmax) + 1);
    m[0] = fdespec::complete_beta(p.a + 1.0, p.b + 1.0);
    for (int k = 1; k <= kmax; ++k)
        m[static_cast<size_t>(k)] = m[static_cast<size_t>(k - 1)] * (p.b + k) / (p.a + p.b + k + 1.0);
    return m;
}

}  // namespace testsupport
