#pragma once

// Experiment front end shared by the command-line tool and the tests:
// convergence studies (error tables and rates) and single solves, written to
// CSV / JSON / gnuplot data.  All output is deterministic: no randomness, no
// timestamps, fixed summation order, files written once after all results
// are collected.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fdespec/analysis.hpp"
#include "fdespec/errors.hpp"
#include "fdespec/problems.hpp"
#include "fdespec/solver.hpp"

namespace fdespec {

struct ExperimentConfig {
    int example = 0;  // 1 or 2 for the built-ins, 0 for a problem file
    std::string problem_path;
    std::optional<double> alpha, r, beta;  // flags override problem-file values
    std::vector<int> N_list;
    int n_quad = 0;        // 0 = auto: max(2 max(N), 128)
    int grid_size = 4096;  // sup-norm grid; also the solve output grid
    std::string out_dir = ".";
    bool emit_csv = true;
    bool emit_json = false;
    bool emit_dat = false;
    std::string cache_path;
};

struct ConvergenceResult {
    double alpha{}, r{}, beta{};  // beta in the caller's (presentation) frame
    int n_quad{};
    std::vector<ErrorReport> errors;
    RateReport rates;
    bool variable_K = false;  // annotates the predicted u rate with '*'
};

// Parse "30,32,34" or "30..38:2" (":step" optional, default 1).
inline std::vector<int> parse_N_list(const std::string& text) {
    auto to_int = [&](const std::string& s) {
        try {
            size_t used = 0;
            const int v = std::stoi(s, &used);
            if (used != s.size()) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            throw config_error("bad N value '" + s + "'");
        }
    };
    std::vector<int> out;
    if (const auto dots = text.find(".."); dots != std::string::npos) {
        const auto colon = text.find(':', dots);
        const int lo = to_int(text.substr(0, dots));
        const int hi = to_int(colon == std::string::npos
                                  ? text.substr(dots + 2)
                                  : text.substr(dots + 2, colon - dots - 2));
        const int step = colon == std::string::npos ? 1 : to_int(text.substr(colon + 1));
        if (step < 1) throw config_error("N range step must be positive");
        for (int n = lo; n <= hi; n += step) out.push_back(n);
        return out;
    }
    size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const std::string tok =
            text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        out.push_back(to_int(tok));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

namespace detail {

inline std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}
inline std::string sci3(double v) { return fmt("%.2e", v); }   // 3 significant digits
inline std::string rate2(double v) { return fmt("%.2f", v); }  // table rate format
inline std::string g17(double v) { return fmt("%.17g", v); }   // machine-reproducible

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << content)) throw io_error("cannot write " + path.string());
}

struct ResolvedProblem {
    ProblemSpec problem;                    // caller frame
    double alpha{}, r{}, beta{};            // presentation values
    std::optional<double> singular_power;   // least endpoint exponent of f, if known
};

inline ResolvedProblem resolve_problem(const ExperimentConfig& cfg) {
    ResolvedProblem rp;
    double alpha;
    std::optional<double> r = cfg.r, beta = cfg.beta;

    if (cfg.example == 1 || cfg.example == 2) {
        if (!cfg.alpha) throw config_error("built-in examples need --alpha");
        alpha = *cfg.alpha;
    } else if (cfg.example == 0) {
        if (cfg.problem_path.empty())
            throw config_error("need --example 1|2 or --problem <path>");
        ProblemSpec file = load_problem(cfg.problem_path);
        alpha = cfg.alpha.value_or(file.alpha);
        if (!r && !beta) r = file.r;
        rp.problem = std::move(file);
    } else {
        throw config_error("--example must be 1 or 2");
    }

    if (!(alpha > 1.0 && alpha < 2.0)) throw config_error("alpha must lie in (1,2)");
    if (r && beta) throw config_error("give r or beta, not both");
    if (beta) {
        if (!(*beta >= alpha - 1.0 && *beta <= 1.0))
            throw config_error("beta must lie in [alpha-1, 1]");
        rp.beta = *beta;
        rp.r = r_from_beta(alpha, *beta);
    } else if (r) {
        if (!(*r >= 0.0 && *r <= 1.0)) throw config_error("r must lie in [0,1]");
        rp.r = *r;
        rp.beta = beta_from_r(alpha, *r);
    } else {
        throw config_error("one of r/beta is required");
    }
    rp.alpha = alpha;

    if (cfg.example == 1) {
        rp.problem = example1(alpha, rp.r);
        rp.singular_power = 2.0 - alpha;
    } else if (cfg.example == 2) {
        rp.problem = example2(alpha, rp.r);
        rp.singular_power = 2.0 - alpha;
    } else {
        rp.problem.alpha = alpha;
        rp.problem.r = rp.r;
    }
    return rp;
}

inline void validate_N_list(const std::vector<int>& Ns) {
    if (Ns.empty()) throw config_error("N list is empty");
    for (size_t i = 0; i < Ns.size(); ++i) {
        if (Ns[i] < 1) throw config_error("N values must be >= 1");
        if (i > 0 && Ns[i] <= Ns[i - 1]) throw config_error("N list must be ascending");
    }
}

inline std::string kappa_cell(const std::vector<double>& kappa, size_t row) {
    return row == 0 ? std::string() : rate2(kappa[row - 1]);
}

inline std::string table_csv(const ConvergenceResult& res) {
    std::string s = "N,err_q,kappa_q,err_u,kappa_u,err_uinf,kappa_uinf\n";
    for (size_t i = 0; i < res.errors.size(); ++i) {
        const ErrorReport& e = res.errors[i];
        s += std::to_string(e.N) + "," + sci3(e.err_q) + "," + kappa_cell(res.rates.kappa_q, i)
             + "," + sci3(e.err_u) + "," + kappa_cell(res.rates.kappa_u, i) + ","
             + sci3(e.err_u_inf) + "," + kappa_cell(res.rates.kappa_u_inf, i) + "\n";
    }
    if (res.rates.predicted.defined) {
        const auto& p = res.rates.predicted;
        s += "Pred.,," + rate2(p.q) + ",," + rate2(p.u) + (res.variable_K ? "*" : "")
             + ",," + rate2(p.u_inf) + "\n";
    }
    return s;
}

inline std::string table_dat(const ConvergenceResult& res) {
    std::string s = "# N err_q err_u err_uinf\n";
    for (const ErrorReport& e : res.errors)
        s += std::to_string(e.N) + " " + g17(e.err_q) + " " + g17(e.err_u) + " "
             + g17(e.err_u_inf) + "\n";
    return s;
}

inline std::string json_array(const std::vector<double>& v) {
    std::string s = "[";
    for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + g17(v[i]);
    return s + "]";
}

inline std::string report_json(const ExperimentConfig& cfg, const ConvergenceResult& res) {
    std::string s = "{\n";
    s += "  \"config\": {\n";
    s += "    \"example\": " + std::to_string(cfg.example) + ",\n";
    s += "    \"problem\": \"" + cfg.problem_path + "\",\n";
    s += "    \"alpha\": " + g17(res.alpha) + ",\n";
    s += "    \"r\": " + g17(res.r) + ",\n";
    s += "    \"beta\": " + g17(res.beta) + ",\n";
    s += "    \"n_quad\": " + std::to_string(res.n_quad) + ",\n";
    s += "    \"grid_size\": " + std::to_string(cfg.grid_size) + "\n";
    s += "  },\n";
    s += "  \"determinism\": \"no randomness; fixed pairwise summation order; "
         "identical configs reproduce byte-identical output\",\n";
    s += "  \"results\": [\n";
    for (size_t i = 0; i < res.errors.size(); ++i) {
        const ErrorReport& e = res.errors[i];
        s += "    {\"N\": " + std::to_string(e.N) + ", \"err_q\": " + g17(e.err_q)
             + ", \"err_u\": " + g17(e.err_u) + ", \"err_u_inf\": " + g17(e.err_u_inf)
             + "}" + (i + 1 < res.errors.size() ? "," : "") + "\n";
    }
    s += "  ],\n";
    s += "  \"kappa_q\": " + json_array(res.rates.kappa_q) + ",\n";
    s += "  \"kappa_u\": " + json_array(res.rates.kappa_u) + ",\n";
    s += "  \"kappa_u_inf\": " + json_array(res.rates.kappa_u_inf) + ",\n";
    if (res.rates.predicted.defined) {
        const auto& p = res.rates.predicted;
        s += "  \"predicted\": {\"j_max\": " + g17(p.j_max) + ", \"q\": " + g17(p.q)
             + ", \"u\": " + g17(p.u) + ", \"u_rate_formal\": "
             + (res.variable_K ? "false" : "true") + ", \"u_inf\": " + g17(p.u_inf)
             + ", \"u_inf_note\": \"reported at the flux rate; known to be "
               "pessimistic\"}\n";
    } else {
        s += "  \"predicted\": null\n";
    }
    s += "}\n";
    return s;
}

}  // namespace detail

// Convergence study over config.N_list: assemble once per N (coefficients are
// shared across the sweep), evaluate the three error norms, compute the
// experimental rates, and emit table.csv / report.json / table.dat.
inline ConvergenceResult run_convergence(const ExperimentConfig& cfg) {
    detail::validate_N_list(cfg.N_list);
    const int n_max = cfg.N_list.back();
    const int n_quad = cfg.n_quad == 0 ? default_n_quad(n_max) : cfg.n_quad;
    if (n_quad < 2 * n_max)
        throw config_error("n_quad must be at least twice the largest N");

    detail::ResolvedProblem rp = detail::resolve_problem(cfg);
    if (!rp.problem.exact_u || !rp.problem.exact_q)
        throw config_error("convergence studies need exact_u and exact_q");

    // Reflection applied once; the N-sweep shares one coefficient set.
    const bool mirror = rp.problem.r < 0.5;
    const ProblemSpec internal = mirror ? reflect(rp.problem) : rp.problem;
    const SpectralParams params = build_params(internal.alpha, internal.r, n_max);
    if (params.r >= 1.0) throw config_error("r = 0 / r = 1 are degenerate");

    std::vector<double> f_all;
    double c_minus1 = 0.0;
    bool have_coeffs = false;
    if (!cfg.cache_path.empty()) {
        if (auto cc = read_coefficient_cache(cfg.cache_path)) {
            if (cc->alpha == params.alpha && cc->r == params.r && cc->beta == params.beta
                && cc->n_quad == n_quad && cc->N >= n_max) {
                f_all = cc->f;
                c_minus1 = cc->c_minus1;
                have_coeffs = true;
            }
        }
    }
    if (!have_coeffs) {
        f_all = compute_f_coeffs(internal, params, n_max, n_quad);
        c_minus1 = f_all[0]
                   / (params.lambda_minus1
                      * jacobi_norm_sq(0, {params.beta - 1.0,
                                           params.alpha - params.beta - 1.0}));
    }

    CoefficientCache cc;
    cc.alpha = params.alpha;
    cc.r = params.r;
    cc.beta = params.beta;
    cc.N = n_max;
    cc.n_quad = n_quad;
    cc.f = f_all;
    cc.c_minus1 = c_minus1;
    cc.c.resize(static_cast<size_t>(n_max));
    const JacobiParams dual{params.beta - 1.0, params.alpha - params.beta - 1.0};
    for (int i = 0; i < n_max; ++i)
        cc.c[static_cast<size_t>(i)] = f_all[static_cast<size_t>(i) + 1]
                                       / (params.lambdas[static_cast<size_t>(i)]
                                          * jacobi_norm_sq(i + 1, dual));

    ConvergenceResult res;
    res.alpha = rp.alpha;
    res.r = rp.r;
    res.beta = rp.beta;
    res.n_quad = n_quad;
    res.variable_K = !rp.problem.K_is_constant;

    std::vector<double> eq, eu, ei;
    for (int N : cfg.N_list) {
        SpectralSolution sol = assemble_from_cache(internal, params, N, n_quad, cc);
        sol.mirrored = mirror;
        ErrorReport er;
        er.N = N;
        er.err_q = weighted_q_error(sol);
        er.err_u = weighted_u_error(sol);
        er.err_u_inf = linf_u_error(sol, cfg.grid_size);
        res.errors.push_back(er);
        eq.push_back(er.err_q);
        eu.push_back(er.err_u);
        ei.push_back(er.err_u_inf);
    }
    if (cfg.N_list.size() >= 2) {
        res.rates.kappa_q = convergence_rate(eq, cfg.N_list);
        res.rates.kappa_u = convergence_rate(eu, cfg.N_list);
        res.rates.kappa_u_inf = convergence_rate(ei, cfg.N_list);
    }
    if (rp.singular_power)
        res.rates.predicted = predicted_rates(rp.alpha, rp.beta, *rp.singular_power);

    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec) throw io_error("cannot create output directory " + cfg.out_dir);
    const std::filesystem::path out(cfg.out_dir);
    if (!cfg.cache_path.empty() && !have_coeffs) {
        SpectralSolution full = assemble_from_cache(internal, params, n_max, n_quad, cc);
        write_coefficient_cache(cfg.cache_path, full, n_quad);
    }
    if (cfg.emit_csv) detail::write_file(out / "table.csv", detail::table_csv(res));
    if (cfg.emit_json) detail::write_file(out / "report.json", detail::report_json(cfg, res));
    if (cfg.emit_dat) detail::write_file(out / "table.dat", detail::table_dat(res));
    return res;
}

// Single solve: tabulate u_N and q_N on the uniform grid (q_N is left blank
// at the endpoints, where it is generally singular).
inline SpectralSolution run_solve(const ExperimentConfig& cfg) {
    detail::validate_N_list(cfg.N_list);
    if (cfg.N_list.size() != 1) throw config_error("solve runs take exactly one N");
    const int N = cfg.N_list[0];
    const int n_quad = cfg.n_quad == 0 ? default_n_quad(N) : cfg.n_quad;
    if (n_quad < 2 * N) throw config_error("n_quad must be at least twice N");

    detail::ResolvedProblem rp = detail::resolve_problem(cfg);
    ProblemSpec problem = rp.problem;
    SpectralSolution sol = solve(problem, N, n_quad);

    std::string csv = "x,u_N,q_N\n";
    std::string dat = "# x u_N\n";
    for (int j = 0; j <= cfg.grid_size; ++j) {
        const double x = static_cast<double>(j) / cfg.grid_size;
        const double u = eval_uN(sol, x);
        csv += detail::g17(x) + "," + detail::g17(u) + ",";
        if (j > 0 && j < cfg.grid_size) csv += detail::g17(eval_qN(sol, x));
        csv += "\n";
        dat += detail::g17(x) + " " + detail::g17(u) + "\n";
    }

    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec) throw io_error("cannot create output directory " + cfg.out_dir);
    const std::filesystem::path out(cfg.out_dir);
    if (!cfg.cache_path.empty()) write_coefficient_cache(cfg.cache_path, sol, n_quad);
    if (cfg.emit_csv) detail::write_file(out / "solution.csv", csv);
    if (cfg.emit_dat) detail::write_file(out / "solution.dat", dat);
    return sol;
}

}  // namespace fdespec
