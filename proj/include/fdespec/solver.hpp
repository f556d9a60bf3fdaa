#pragma once

// The spectral method: expand the forcing in the dual Jacobi basis, invert
// the diagonalized flux operator, fix the kernel multiple from the integral
// constraint, and evaluate the flux q_N and the solution u_N.
//
// The method itself requires r in [1/2, 1); r < 1/2 is handled by solving the
// x -> 1-x reflected problem and mirroring evaluations back (solutions carry
// a `mirrored` flag).  r = 1 (and r = 0) are rejected: the scale of the
// kernel-adjacent mode vanishes there.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "fdespec/errors.hpp"
#include "fdespec/problems.hpp"
#include "fdespec/quadrature.hpp"
#include "fdespec/spectral_params.hpp"
#include "fdespec/specfun.hpp"

namespace fdespec {

struct SpectralSolution {
    int N{};
    std::vector<double> f_coeffs;  // f_0 .. f_N
    double c_minus1{};             // coefficient of x k(x)
    std::vector<double> c;         // c_0 .. c_{N-1}
    double c_minus2{};             // kernel multiple fixed by int (q~/K) = 0
    SpectralParams params;         // internal (solve-frame) parameters
    ProblemSpec problem;           // internal-frame problem
    bool mirrored = false;         // true when the reflected problem was solved

    // Quadrature rules for the variable-coefficient u_N path (split at 1/2).
    QuadratureRule u_rule_left, u_rule_right;

    double alpha() const { return params.alpha; }
    // Exponent beta in the caller's frame (reflection maps beta to alpha-beta).
    double beta_presented() const {
        return mirrored ? params.alpha - params.beta : params.beta;
    }
};

// Fourier-Jacobi coefficients f_i = int_0^1 rho^(beta-1, alpha-beta-1) f G_i dx
// for i = 0..M.
//
// Three routes, in order of preference:
//  - a preset coefficient table (used verbatim, zero-padded past its end);
//  - the structured decomposition f = sum_k x^p (1-x)^q * smooth_k: each term
//    integrates under the matched weight (beta-1+q, alpha-beta-1+p), so
//    polynomial factors are captured exactly by the rule;
//  - a single shared rule on the assembled f (accurate only for f smooth
//    relative to the weight; endpoint-singular f converges algebraically).
inline std::vector<double> compute_f_coeffs(const ProblemSpec& problem,
                                            const SpectralParams& params, int M,
                                            int n_quad) {
    if (M < 0) throw std::domain_error("compute_f_coeffs: negative count");
    if (n_quad < M + 16)
        throw std::domain_error("compute_f_coeffs: n_quad must be at least M+16");
    const double alpha = params.alpha, beta = params.beta;
    const JacobiParams dual{beta - 1.0, alpha - beta - 1.0};

    std::vector<double> out(static_cast<size_t>(M) + 1, 0.0);
    if (!problem.f_coeff_table.empty()) {
        const size_t n = std::min(problem.f_coeff_table.size(), out.size());
        std::copy_n(problem.f_coeff_table.begin(), n, out.begin());
        return out;
    }

    struct Piece {
        JacobiParams rule_params;
        std::function<double(double)> factor;
    };
    std::vector<Piece> pieces;
    if (!problem.f_terms.empty()) {
        for (const auto& t : problem.f_terms)
            pieces.push_back({{dual.a + t.omx_exp, dual.b + t.x_exp}, t.factor});
    } else {
        if (!problem.f) throw std::invalid_argument("compute_f_coeffs: problem has no f");
        pieces.push_back({dual, problem.f});
    }

    std::vector<double> g(static_cast<size_t>(M) + 1);
    std::vector<double> contrib(static_cast<size_t>(M + 1) * n_quad);
    for (const auto& piece : pieces) {
        const QuadratureRule rule = gauss_jacobi(n_quad, piece.rule_params);
        for (int m = 0; m < n_quad; ++m) {
            const double x = rule.nodes[static_cast<size_t>(m)];
            const double v = piece.factor(x);
            if (!std::isfinite(v))
                throw numerical_error("compute_f_coeffs: f blows up at node "
                                      + std::to_string(m) + " (x = " + std::to_string(x)
                                      + ")");
            const double wv = rule.weights[static_cast<size_t>(m)] * v;
            jacobi_G_sequence(M, dual, x, g.data());
            for (int i = 0; i <= M; ++i)
                contrib[static_cast<size_t>(i) * n_quad + m] = wv * g[static_cast<size_t>(i)];
        }
        for (int i = 0; i <= M; ++i)
            out[static_cast<size_t>(i)] += detail::pairwise_sum(
                {contrib.data() + static_cast<size_t>(i) * n_quad,
                 static_cast<size_t>(n_quad)});
    }
    return out;
}

namespace detail {

// sum_{i=0}^{N-1} c_i G_i^(alpha-beta, beta)(x), one running recurrence sweep.
inline double weighted_series(const SpectralSolution& sol, double x) {
    const int N = sol.N;
    const double a = sol.params.alpha - sol.params.beta, b = sol.params.beta;
    const double xx = 2.0 * x - 1.0;
    double gm = 1.0;
    double acc = sol.c[0] * gm;
    if (N == 1) return acc;
    double gc = 0.5 * ((a + b + 2.0) * xx + (a - b));
    acc += sol.c[1] * gc;
    for (int k = 1; k < N - 1; ++k) {
        const double s = 2.0 * k + a + b;
        const double c1 = 2.0 * (k + 1.0) * (k + a + b + 1.0) * s;
        const double c2 = (s + 1.0) * (a * a - b * b);
        const double c3 = s * (s + 1.0) * (s + 2.0);
        const double c4 = 2.0 * (k + a) * (k + b) * (s + 2.0);
        const double gn = ((c2 + c3 * xx) * gc - c4 * gm) / c1;
        acc += sol.c[static_cast<size_t>(k) + 1] * gn;
        gm = gc;
        gc = gn;
    }
    return acc;
}

// q_N in the internal frame.
inline double eval_q_raw(const SpectralSolution& sol, double x) {
    const double alpha = sol.params.alpha, beta = sol.params.beta;
    const double xk = std::pow(x, beta) * std::pow(1.0 - x, alpha - beta - 1.0);
    return sol.c_minus1 * xk
           + rho_weight({alpha - beta, beta}, x) * weighted_series(sol, x);
}

// q~_N = c_-2 k + q_N in the internal frame.
inline double eval_flux_raw(const SpectralSolution& sol, double x) {
    return sol.c_minus2 * kernel_value(sol.params.alpha, sol.params.beta, x)
           + eval_q_raw(sol, x);
}

// Constant-K closed form for u_N: incomplete-beta terms for the kernel-like
// modes plus the exact antiderivative of the weighted series,
// int_0^x rho^(a,b) G_n = -(1/n) rho^(a+1,b+1)(x) G_{n-1}^(a+1,b+1)(x), n >= 1.
inline double eval_u_closed_form(const SpectralSolution& sol, double x) {
    const double alpha = sol.params.alpha, beta = sol.params.beta;
    const double K0 = sol.problem.K(0.5);
    double val = sol.c_minus2 * incomplete_beta(x, beta, alpha - beta)
                 + sol.c_minus1 * incomplete_beta(x, beta + 1.0, alpha - beta)
                 + sol.c[0] * incomplete_beta(x, beta + 1.0, alpha - beta + 1.0);
    if (sol.N >= 2) {
        const double a = alpha - beta + 1.0, b = beta + 1.0;
        const double xx = 2.0 * x - 1.0;
        double gm = 1.0;  // G_0^(a,b)
        double ser = sol.c[1] / 1.0 * gm;
        double gc = 0.5 * ((a + b + 2.0) * xx + (a - b));
        if (sol.N >= 3) ser += sol.c[2] / 2.0 * gc;
        for (int k = 1; k + 2 < sol.N; ++k) {
            const double s = 2.0 * k + a + b;
            const double c1 = 2.0 * (k + 1.0) * (k + a + b + 1.0) * s;
            const double c2 = (s + 1.0) * (a * a - b * b);
            const double c3 = s * (s + 1.0) * (s + 2.0);
            const double c4 = 2.0 * (k + a) * (k + b) * (s + 2.0);
            const double gn = ((c2 + c3 * xx) * gc - c4 * gm) / c1;
            ser += sol.c[static_cast<size_t>(k) + 2] / (k + 2.0) * gn;
            gm = gc;
            gc = gn;
        }
        val -= rho_weight({a, b}, x) * ser;
    }
    return -val / K0;
}

// Variable-K path: per-x quadrature of -int_0^x (c_-2 k + q_N)/K with the
// substitution s = x t (rule (0, beta-1)) for x <= 1/2, and the mirrored
// substitution s = 1-(1-x)t (rule (0, alpha-beta-1)) for x > 1/2.  Both leave
// a factor analytic on [0,1] at the nodes, so convergence is geometric.
inline double eval_u_quadrature(const SpectralSolution& sol, double x) {
    const double alpha = sol.params.alpha, beta = sol.params.beta;
    const auto& K = sol.problem.K;
    if (x <= 0.5) {
        const auto& rule = sol.u_rule_left;
        std::vector<double> terms(rule.nodes.size());
        for (size_t m = 0; m < rule.nodes.size(); ++m) {
            const double t = rule.nodes[m];
            const double s = x * t;
            const double bracket =
                (sol.c_minus2 + sol.c_minus1 * s) * std::pow(1.0 - s, alpha - beta - 1.0)
                + t * x * std::pow(1.0 - s, alpha - beta) * weighted_series(sol, s);
            terms[m] = rule.weights[m] * bracket / K(s);
        }
        return -std::pow(x, beta) * pairwise_sum(terms);
    }
    const auto& rule = sol.u_rule_right;
    std::vector<double> terms(rule.nodes.size());
    for (size_t m = 0; m < rule.nodes.size(); ++m) {
        const double t = rule.nodes[m];
        const double s = 1.0 - (1.0 - x) * t;
        const double bracket =
            (sol.c_minus2 + sol.c_minus1 * s) * std::pow(s, beta - 1.0)
            + t * (1.0 - x) * std::pow(s, beta) * weighted_series(sol, s);
        terms[m] = rule.weights[m] * bracket / K(s);
    }
    return std::pow(1.0 - x, alpha - beta) * pairwise_sum(terms);
}

inline double eval_u_raw(const SpectralSolution& sol, double x) {
    if (x == 0.0 || x == 1.0) return 0.0;
    return sol.problem.K_is_constant ? eval_u_closed_form(sol, x)
                                     : eval_u_quadrature(sol, x);
}

}  // namespace detail

// c_-2 = -[int_0^1 q_N / K] / [int_0^1 k / K]; the numerator splits into the
// x k(x) mode (weight (alpha-beta-1, beta) applied to 1/K) and the series
// (weight (alpha-beta, beta) applied to series/K); the denominator uses
// weight (alpha-beta-1, beta-1) applied to 1/K.
inline double compute_c_minus2(const SpectralSolution& sol, int n_quad) {
    const double alpha = sol.params.alpha, beta = sol.params.beta;
    const auto& K = sol.problem.K;
    double num = 0.0;
    if (sol.c_minus1 != 0.0) {
        const QuadratureRule xk_rule = gauss_jacobi(n_quad, {alpha - beta - 1.0, beta});
        num += sol.c_minus1 * integrate(xk_rule, [&](double x) { return 1.0 / K(x); });
    }
    const QuadratureRule series_rule = gauss_jacobi(n_quad, {alpha - beta, beta});
    num += integrate(series_rule,
                     [&](double x) { return detail::weighted_series(sol, x) / K(x); });
    const QuadratureRule k_rule = gauss_jacobi(n_quad, {alpha - beta - 1.0, beta - 1.0});
    const double den = integrate(k_rule, [&](double x) { return 1.0 / K(x); });
    if (std::abs(den) < 1e-300)
        throw numerical_error("compute_c_minus2: degenerate kernel integral");
    return -num / den;
}

// Diagonal inversion: c_i = f_{i+1} / (lambda_i |||G_{i+1}^(beta-1,alpha-beta-1)|||^2)
// for i = -1 .. N-1.  Requires r in [1/2, 1) (reflect first otherwise).
inline SpectralSolution assemble(const ProblemSpec& problem, const SpectralParams& params,
                                 int N, int n_quad) {
    if (N < 1) throw std::domain_error("assemble: N must be >= 1");
    if (!(params.r >= 0.5))
        throw std::domain_error("assemble: r < 1/2; solve() applies the reflection");
    if (params.r >= 1.0)
        throw std::domain_error("assemble: r = 1 unsupported (kernel-mode scale vanishes)");
    if (static_cast<int>(params.lambdas.size()) < N)
        throw std::invalid_argument("assemble: params built with too few modes");

    SpectralSolution sol;
    sol.N = N;
    sol.params = params;
    sol.problem = problem;
    sol.f_coeffs = compute_f_coeffs(problem, params, N, n_quad);

    const double alpha = params.alpha, beta = params.beta;
    const JacobiParams dual{beta - 1.0, alpha - beta - 1.0};
    sol.c_minus1 = sol.f_coeffs[0] / (params.lambda_minus1 * jacobi_norm_sq(0, dual));
    sol.c.resize(static_cast<size_t>(N));
    for (int i = 0; i < N; ++i)
        sol.c[static_cast<size_t>(i)] =
            sol.f_coeffs[static_cast<size_t>(i) + 1]
            / (params.lambdas[static_cast<size_t>(i)] * jacobi_norm_sq(i + 1, dual));

    sol.u_rule_left = gauss_jacobi(96, {0.0, beta - 1.0});
    sol.u_rule_right = gauss_jacobi(96, {0.0, alpha - beta - 1.0});
    sol.c_minus2 = compute_c_minus2(sol, n_quad);
    return sol;
}

inline int default_n_quad(int N) { return std::max(2 * N, 128); }

// End-to-end entry point: validates the problem, applies the reflection for
// r < 1/2, and assembles.  n_quad = 0 picks max(2N, 128).
inline SpectralSolution solve(const ProblemSpec& problem, int N, int n_quad = 0) {
    if (!(problem.alpha > 1.0 && problem.alpha < 2.0))
        throw std::domain_error("solve: alpha outside (1,2)");
    if (!(problem.r >= 0.0 && problem.r <= 1.0))
        throw std::domain_error("solve: r outside [0,1]");
    if (problem.r == 0.0 || problem.r == 1.0)
        throw std::domain_error("solve: r = 0 and r = 1 are degenerate (kernel-mode "
                                "scale vanishes); choose r strictly inside (0,1)");
    if (!problem.K) throw std::invalid_argument("solve: problem has no K");
    if (n_quad == 0) n_quad = default_n_quad(N);

    const bool mirror = problem.r < 0.5;
    const ProblemSpec internal = mirror ? reflect(problem) : problem;
    const SpectralParams params = build_params(internal.alpha, internal.r, N);
    SpectralSolution sol = assemble(internal, params, N, n_quad);
    sol.mirrored = mirror;
    return sol;
}

// Flux approximation q_N at x in (0,1); endpoint values are generally
// singular, so x in {0,1} is rejected.
inline double eval_qN(const SpectralSolution& sol, double x) {
    if (!(x > 0.0 && x < 1.0))
        throw std::domain_error("eval_qN: q_N is singular at the endpoints; "
                                "evaluate limits explicitly if needed");
    return sol.mirrored ? -detail::eval_q_raw(sol, 1.0 - x) : detail::eval_q_raw(sol, x);
}

// Constrained flux q~_N = c_-2 k + q_N.
inline double eval_flux(const SpectralSolution& sol, double x) {
    if (!(x > 0.0 && x < 1.0))
        throw std::domain_error("eval_flux: singular at the endpoints");
    return sol.mirrored ? -detail::eval_flux_raw(sol, 1.0 - x)
                        : detail::eval_flux_raw(sol, x);
}

// Solution approximation u_N on [0,1]; both boundary values are exactly 0.
inline double eval_uN(const SpectralSolution& sol, double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("eval_uN: x outside [0,1]");
    return sol.mirrored ? detail::eval_u_raw(sol, 1.0 - x) : detail::eval_u_raw(sol, x);
}

// ---------------------------------------------------------------------------
// Coefficient cache: textual, hexadecimal-float payload for bit-exact reload.
// Header line:  alpha r beta N n_quad   (values in the internal frame)
// Body lines:   i f_i c_i   for i = -1 .. N, with f_{-1} and c_N as zero
//               placeholders (c_{-1} is the x k(x) coefficient).
// ---------------------------------------------------------------------------

struct CoefficientCache {
    double alpha{}, r{}, beta{};
    int N{}, n_quad{};
    std::vector<double> f;  // f_0 .. f_N
    double c_minus1{};
    std::vector<double> c;  // c_0 .. c_{N-1}
};

inline void write_coefficient_cache(const std::filesystem::path& path,
                                    const SpectralSolution& sol, int n_quad) {
    std::string body;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %d %d\n", sol.params.alpha,
                  sol.params.r, sol.params.beta, sol.N, n_quad);
    body += buf;
    std::snprintf(buf, sizeof buf, "-1 %a %a\n", 0.0, sol.c_minus1);
    body += buf;
    for (int i = 0; i < sol.N; ++i) {
        std::snprintf(buf, sizeof buf, "%d %a %a\n", i, sol.f_coeffs[static_cast<size_t>(i)],
                      sol.c[static_cast<size_t>(i)]);
        body += buf;
    }
    std::snprintf(buf, sizeof buf, "%d %a %a\n", sol.N,
                  sol.f_coeffs[static_cast<size_t>(sol.N)], 0.0);
    body += buf;
    std::ofstream out(path);
    if (!out || !(out << body)) throw io_error("cannot write cache " + path.string());
}

inline std::optional<CoefficientCache> read_coefficient_cache(
    const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    CoefficientCache cc;
    std::string header;
    if (!std::getline(in, header)) return std::nullopt;
    {
        std::istringstream iss(header);
        if (!(iss >> cc.alpha >> cc.r >> cc.beta >> cc.N >> cc.n_quad) || cc.N < 1)
            return std::nullopt;
    }
    cc.f.assign(static_cast<size_t>(cc.N) + 1, 0.0);
    cc.c.assign(static_cast<size_t>(cc.N), 0.0);
    std::string line;
    int seen = 0;
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        int i;
        char fs[64], cs[64];
        if (std::sscanf(line.c_str(), "%d %63s %63s", &i, fs, cs) != 3) return std::nullopt;
        const double fv = std::strtod(fs, nullptr);
        const double cv = std::strtod(cs, nullptr);
        if (i == -1)
            cc.c_minus1 = cv;
        else if (i >= 0 && i <= cc.N) {
            cc.f[static_cast<size_t>(i)] = fv;
            if (i < cc.N) cc.c[static_cast<size_t>(i)] = cv;
        } else
            return std::nullopt;
        ++seen;
    }
    if (seen != cc.N + 2) return std::nullopt;
    return cc;
}

// Rebuild a solution from cached coefficients (c_-2 is recomputed; it is a
// deterministic function of the cached data).
inline SpectralSolution assemble_from_cache(const ProblemSpec& problem,
                                            const SpectralParams& params, int N,
                                            int n_quad, const CoefficientCache& cc) {
    if (cc.N < N) throw std::invalid_argument("assemble_from_cache: cache too short");
    SpectralSolution sol;
    sol.N = N;
    sol.params = params;
    sol.problem = problem;
    sol.f_coeffs.assign(cc.f.begin(), cc.f.begin() + N + 1);
    sol.c_minus1 = cc.c_minus1;
    sol.c.assign(cc.c.begin(), cc.c.begin() + N);
    const double alpha = params.alpha, beta = params.beta;
    sol.u_rule_left = gauss_jacobi(96, {0.0, beta - 1.0});
    sol.u_rule_right = gauss_jacobi(96, {0.0, alpha - beta - 1.0});
    sol.c_minus2 = compute_c_minus2(sol, n_quad);
    return sol;
}

}  // namespace fdespec
