#pragma once

// Weighted-norm error measurement, experimental convergence rates, and the
// closed-form predicted rates.
//
// Error integrals run in the solution's internal frame; for mirrored
// solutions these equal the caller-frame values by the change of variables
// x -> 1-x (the reflected problem already carries the mirrored exact
// solutions).

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "fdespec/quadrature.hpp"
#include "fdespec/solver.hpp"

namespace fdespec {

struct ErrorReport {
    int N{};
    double err_q{};      // ||q - q_N|| in the rho^(-(alpha-beta), -beta) norm
    double err_u{};      // ||u - u_N|| in the rho^(-(alpha-beta+1), -(beta+1)) norm
    double err_u_inf{};  // sup |u - u_N| over the sampling grid
};

struct PredictedRates {
    bool defined = false;  // false when j_max <= 0 ("no predicted rate")
    double j_max{};
    double q{};
    double u{};
    double u_inf{};  // reported at the q rate; known to be pessimistic
};

struct RateReport {
    std::vector<double> kappa_q, kappa_u, kappa_u_inf;
    PredictedRates predicted;
};

// ||q - q_N|| in the negative-exponent weighted norm, computed by absorbing
// the weight: int rho^(-(a),-b) e^2 = int rho^(a,b) (e/rho^(a,b))^2 with the
// rule of the positive weight (a,b) = (alpha-beta, beta).
inline double weighted_q_error(const SpectralSolution& sol, int n_quad = 256) {
    if (!sol.problem.exact_q)
        throw std::invalid_argument("weighted_q_error: problem supplies no exact_q");
    const double alpha = sol.params.alpha, beta = sol.params.beta;
    const JacobiParams w{alpha - beta, beta};
    const QuadratureRule rule = gauss_jacobi(n_quad, w);
    const double val = integrate(rule, [&](double x) {
        const double e = sol.problem.exact_q(x) - detail::eval_q_raw(sol, x);
        const double h = e / rho_weight(w, x);
        return h * h;
    });
    return std::sqrt(val);
}

// ||u - u_N|| with divisor weight rho^(alpha-beta+1, beta+1).
inline double weighted_u_error(const SpectralSolution& sol, int n_quad = 256) {
    if (!sol.problem.exact_u)
        throw std::invalid_argument("weighted_u_error: problem supplies no exact_u");
    const double alpha = sol.params.alpha, beta = sol.params.beta;
    const JacobiParams w{alpha - beta + 1.0, beta + 1.0};
    const QuadratureRule rule = gauss_jacobi(n_quad, w);
    const double val = integrate(rule, [&](double x) {
        const double e = sol.problem.exact_u(x) - detail::eval_u_raw(sol, x);
        const double h = e / rho_weight(w, x);
        return h * h;
    });
    return std::sqrt(val);
}

// sup |u - u_N| over the uniform grid of grid_size+1 points on [0,1]
// (both differences vanish exactly at the endpoints).
inline double linf_u_error(const SpectralSolution& sol, int grid_size = 4096) {
    if (!sol.problem.exact_u)
        throw std::invalid_argument("linf_u_error: problem supplies no exact_u");
    if (grid_size < 1) throw std::domain_error("linf_u_error: grid_size must be >= 1");
    double worst = 0.0;
    for (int j = 0; j <= grid_size; ++j) {
        const double x = static_cast<double>(j) / grid_size;
        const double e = std::abs(sol.problem.exact_u(x) - detail::eval_u_raw(sol, x));
        worst = std::max(worst, e);
    }
    return worst;
}

// kappa_m = log(e_m / e_{m+1}) / log(N_{m+1} / N_m) for adjacent pairs.
inline std::vector<double> convergence_rate(std::span<const double> errors,
                                            std::span<const int> Ns) {
    if (errors.size() != Ns.size() || errors.size() < 2)
        throw std::domain_error("convergence_rate: need matching sequences of length >= 2");
    for (size_t m = 0; m < errors.size(); ++m) {
        if (!(errors[m] > 0.0))
            throw std::domain_error("convergence_rate: errors must be positive");
        if (m > 0 && !(Ns[m] > Ns[m - 1]))
            throw std::domain_error("convergence_rate: Ns must be strictly increasing");
    }
    std::vector<double> kappa(errors.size() - 1);
    for (size_t m = 0; m + 1 < errors.size(); ++m)
        kappa[m] = std::log(errors[m] / errors[m + 1])
                   / std::log(static_cast<double>(Ns[m + 1]) / Ns[m]);
    return kappa;
}

// Theoretical asymptotic rates for a forcing whose least endpoint exponent is
// singular_power: the regularity index is j_max = singular_power + 2 - beta,
// giving N^-(alpha-1+j) for the flux and N^-(alpha+j) for the solution.  The
// sup-norm column is predicted at the flux rate.
inline PredictedRates predicted_rates(double alpha, double beta, double singular_power) {
    PredictedRates p;
    p.j_max = singular_power + 2.0 - beta;
    if (!(p.j_max > 0.0)) return p;  // no predicted rate
    p.defined = true;
    p.q = alpha - 1.0 + p.j_max;
    p.u = alpha + p.j_max;
    p.u_inf = alpha - 1.0 + p.j_max;
    return p;
}

}  // namespace fdespec
