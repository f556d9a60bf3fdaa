#pragma once

// Gauss-Jacobi quadrature on (0,1) for endpoint-singular weights
// rho^(a,b)(x) = (1-x)^a x^b, plus numerical left/right fractional integrals
// of order sigma in (0,1) and the two-sided flux operator used to validate
// the spectral diagonalization.
//
// Nodes and weights come from the Golub-Welsch eigenproblem of the monic
// Jacobi recurrence, solved with a self-contained implicit-shift QL sweep.
// Supported order is capped at 512.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "fdespec/errors.hpp"
#include "fdespec/specfun.hpp"

namespace fdespec {

inline constexpr int kMaxQuadratureOrder = 512;

namespace detail {

// Pairwise (cascade) summation: deterministic and with O(log n) error growth.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

// Implicit-shift QL for a symmetric tridiagonal matrix, accumulating the
// first row of the eigenvector matrix in z.  d: diagonal (in/out, becomes
// eigenvalues), e: subdiagonal in e[0..n-2].
inline void tridiag_ql(std::vector<double>& d, std::vector<double>& e,
                       std::vector<double>& z) {
    const int n = static_cast<int>(d.size());
    e.resize(static_cast<size_t>(n), 0.0);
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m = l;
        for (;;) {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
            }
            if (m == l) break;
            if (++iter > 100)
                throw numerical_error("gauss_jacobi: QL sweep cap exceeded");
            double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            double r = std::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
            double s = 1.0, c = 1.0, p = 0.0;
            for (int i = m - 1; i >= l; --i) {
                double f = s * e[i];
                const double b = c * e[i];
                r = std::hypot(f, g);
                e[i + 1] = r;
                if (r == 0.0) {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if (r == 0.0 && m - 1 >= l) continue;
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

}  // namespace detail

struct QuadratureRule {
    JacobiParams params{};
    std::vector<double> nodes;    // ascending, strictly inside (0,1)
    std::vector<double> weights;  // positive; sum equals B(a+1, b+1)
    int order() const { return static_cast<int>(nodes.size()); }
};

// n-point Gauss-Jacobi rule for weight (1-x)^a x^b on (0,1).
inline QuadratureRule gauss_jacobi(int n, JacobiParams p) {
    if (n < 1) throw std::domain_error("gauss_jacobi: order must be >= 1");
    if (n > kMaxQuadratureOrder)
        throw std::domain_error("gauss_jacobi: order cap is "
                                + std::to_string(kMaxQuadratureOrder));
    if (!(p.a > -1.0 && p.b > -1.0))
        throw std::domain_error("gauss_jacobi: weight exponents must exceed -1");
    const double a = p.a, b = p.b;

    // Monic recurrence coefficients on (-1,1) for (1-x)^a (1+x)^b.
    std::vector<double> diag(static_cast<size_t>(n)), sub(static_cast<size_t>(n), 0.0);
    diag[0] = (b - a) / (a + b + 2.0);
    for (int k = 1; k < n; ++k) {
        const double s = 2.0 * k + a + b;
        diag[static_cast<size_t>(k)] = (b * b - a * a) / (s * (s + 2.0));
        double bk;
        if (k == 1)
            bk = 4.0 * (a + 1.0) * (b + 1.0)
                 / ((a + b + 2.0) * (a + b + 2.0) * (a + b + 3.0));
        else
            bk = 4.0 * k * (k + a) * (k + b) * (k + a + b)
                 / (s * s * (s + 1.0) * (s - 1.0));
        sub[static_cast<size_t>(k - 1)] = std::sqrt(bk);
    }

    std::vector<double> z(static_cast<size_t>(n), 0.0);
    z[0] = 1.0;
    detail::tridiag_ql(diag, sub, z);

    std::vector<int> idx(static_cast<size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int i, int j) { return diag[i] < diag[j]; });

    QuadratureRule rule;
    rule.params = p;
    rule.nodes.resize(static_cast<size_t>(n));
    rule.weights.resize(static_cast<size_t>(n));
    const double mass = complete_beta(a + 1.0, b + 1.0);
    for (int j = 0; j < n; ++j) {
        rule.nodes[static_cast<size_t>(j)] = 0.5 * (diag[static_cast<size_t>(idx[j])] + 1.0);
        rule.weights[static_cast<size_t>(j)] =
            mass * z[static_cast<size_t>(idx[j])] * z[static_cast<size_t>(idx[j])];
    }

    for (int j = 0; j < n; ++j) {
        if (!(rule.nodes[j] > 0.0 && rule.nodes[j] < 1.0) || !(rule.weights[j] > 0.0))
            throw numerical_error("gauss_jacobi: invalid node/weight from eigen solve");
        if (j > 0 && !(rule.nodes[j] > rule.nodes[j - 1]))
            throw numerical_error("gauss_jacobi: nodes not strictly ascending");
    }
    const double wsum = detail::pairwise_sum(rule.weights);
    if (std::abs(wsum / mass - 1.0) > 1e-12)
        throw numerical_error("gauss_jacobi: weight sum deviates from moment 0");
    return rule;
}

// Sum_m w_m g(x_m), approximating int_0^1 rho^(a,b) g.  Pairwise reduction.
template <class F>
inline double integrate(const QuadratureRule& rule, F&& g) {
    std::vector<double> terms(rule.nodes.size());
    for (size_t m = 0; m < rule.nodes.size(); ++m) {
        const double v = g(rule.nodes[m]);
        if (!std::isfinite(v))
            throw numerical_error("integrate: non-finite integrand at node "
                                  + std::to_string(m) + " (x = "
                                  + std::to_string(rule.nodes[m]) + ")");
        terms[m] = rule.weights[m] * v;
    }
    return detail::pairwise_sum(terms);
}

enum class Side { left, right };

// Riemann-Liouville fractional integral of order sigma in (0,1).
struct FracIntegralSpec {
    double sigma;
    Side side;
};

namespace detail {

template <class F>
inline double frac_integral_with_rule(const FracIntegralSpec& spec, F&& w, double x,
                                      const QuadratureRule& rule) {
    const double inv_gamma = std::exp(-log_gamma(spec.sigma));
    if (spec.side == Side::left) {
        // int_0^x w(s)(x-s)^(sigma-1) ds / Gamma = x^sigma/Gamma * int rho^(sigma-1,0) w(x t)
        return std::pow(x, spec.sigma) * inv_gamma
               * integrate(rule, [&](double t) { return w(x * t); });
    }
    return std::pow(1.0 - x, spec.sigma) * inv_gamma
           * integrate(rule, [&](double t) { return w(x + (1.0 - x) * t); });
}

inline JacobiParams frac_rule_params(const FracIntegralSpec& spec) {
    // The kernel singularity maps exactly onto a Jacobi weight.
    return spec.side == Side::left ? JacobiParams{spec.sigma - 1.0, 0.0}
                                   : JacobiParams{0.0, spec.sigma - 1.0};
}

}  // namespace detail

template <class F>
inline double frac_integral(const FracIntegralSpec& spec, F&& w, double x, int n) {
    if (!(spec.sigma > 0.0 && spec.sigma < 1.0))
        throw std::domain_error("frac_integral: order must lie in (0,1)");
    if (!(x > 0.0 && x < 1.0))
        throw std::domain_error("frac_integral: evaluation point outside (0,1)");
    const QuadratureRule rule = gauss_jacobi(n, detail::frac_rule_params(spec));
    return detail::frac_integral_with_rule(spec, std::forward<F>(w), x, rule);
}

// Two-sided flux operator D(r 0Ix^(2-alpha) + (1-r) xI1^(2-alpha)) applied to q
// at an interior point, via a 5-point centered first-derivative stencil.
// Validation-only path: the solver itself uses the analytic diagonalization.
template <class F>
inline double apply_flux_operator(double alpha, double r, F&& q, double x,
                                  int n = 400, double h = 1e-3) {
    if (!(alpha > 1.0 && alpha < 2.0))
        throw std::domain_error("apply_flux_operator: alpha outside (1,2)");
    if (!(x > 2.0 * h && x < 1.0 - 2.0 * h))
        throw std::domain_error("apply_flux_operator: x too close to the boundary");
    const double sigma = 2.0 - alpha;
    const QuadratureRule left = gauss_jacobi(n, {sigma - 1.0, 0.0});
    const QuadratureRule right = gauss_jacobi(n, {0.0, sigma - 1.0});
    auto g = [&](double y) {
        double v = 0.0;
        if (r != 0.0)
            v += r * detail::frac_integral_with_rule({sigma, Side::left}, q, y, left);
        if (r != 1.0)
            v += (1.0 - r) * detail::frac_integral_with_rule({sigma, Side::right}, q, y, right);
        return v;
    };
    return (g(x - 2.0 * h) - 8.0 * g(x - h) + 8.0 * g(x + h) - g(x + 2.0 * h)) / (12.0 * h);
}

}  // namespace fdespec
