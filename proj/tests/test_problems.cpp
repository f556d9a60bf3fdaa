#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "fdespec/problems.hpp"
#include "fdespec/quadrature.hpp"
#include "fdespec/solver.hpp"
#include "test_support.hpp"

using namespace fdespec;
using testsupport::rel_err;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& content) {
    const fs::path p = fs::temp_directory_path() / name;
    std::ofstream out(p);
    out << content;
    return p;
}

}  // namespace

TEST_CASE("example1 exact solutions") {
    const double alpha = 1.6;
    const double r = r_from_beta(alpha, 0.85);
    const ProblemSpec p = example1(alpha, r);
    CHECK(p.exact_u(0.0) == 0.0);
    CHECK(std::abs(p.exact_u(1.0)) < 1e-14);
    CHECK(std::abs(p.exact_q(0.5) + 1.5) < 1e-15);
    CHECK(p.K_is_constant);

    // the forcing scale: delta = alpha^3 - 9 alpha^2 + 26 alpha - 24 = -1.344
    const double delta = -1.344;
    const double g2a = std::exp(log_gamma(2.0 - alpha));
    const double x = 0.3;
    const double want = 6.0 * r / (g2a * delta)
                            * ((2 * alpha - 8) * std::pow(x, 3.0 - alpha)
                               + (alpha - 3) * (alpha - 4) * std::pow(x, 2.0 - alpha))
                        + 6.0 * (1.0 - r) / (g2a * delta)
                              * (-(2 * alpha - 8) * std::pow(1.0 - x, 3.0 - alpha)
                                 - (alpha - 3) * (alpha - 4) * std::pow(1.0 - x, 2.0 - alpha));
    CHECK(rel_err(p.f(x), want) < 1e-12);

    // u via the incomplete-beta identity: x^b 2F1(b+1-a, b; b+1; x)/b = B(x; b, a-b)
    const double beta = beta_from_r(alpha, r);
    for (double t : {0.2, 0.5, 0.8, 0.95}) {
        const double u_ib = 3 * t * t - 2 * t * t * t
                            - incomplete_beta(t, beta, alpha - beta)
                                  / complete_beta(beta, alpha - beta);
        CHECK(std::abs(p.exact_u(t) - u_ib) < 1e-12);
    }
}

TEST_CASE("example2 exact solutions") {
    const ProblemSpec p = example2(1.8, 0.5);
    CHECK(std::abs(p.exact_u(0.5) - 1.0 / 16.0) < 1e-16);
    CHECK(p.exact_q(0.5) == 0.0);
    CHECK(!p.K_is_constant);
    // q = -K Du with Du = 2x(1-x)(1-2x)
    const double x = 0.3;
    const double Du = 2.0 * x * (1.0 - x) * (1.0 - 2.0 * x);
    CHECK(rel_err(p.exact_q(x), -(1.0 + x * x) * Du) < 1e-15);
}

TEST_CASE("forcings are consistent with the flux operator") {
    // guards the transcription of the forcing formulas: applying the two-sided
    // operator to the exact flux must reproduce f pointwise
    for (auto [ex, alpha, beta] :
         {std::tuple{1, 1.6, 0.85}, {1, 1.8, 0.9}, {2, 1.6, 0.85}, {2, 1.4, 0.7},
          {2, 1.8, 0.9}}) {
        const double r = r_from_beta(alpha, beta);
        const ProblemSpec p = ex == 1 ? example1(alpha, r) : example2(alpha, r);
        double scale = 0.0;
        for (double x : {0.3, 0.5, 0.7}) scale = std::max(scale, std::abs(p.f(x)));
        for (double x : {0.3, 0.5, 0.7}) {
            // f can vanish at the midpoint for symmetric configurations, so
            // the comparison is scaled by the overall size of f
            const double got = apply_flux_operator(alpha, r, p.exact_q, x);
            CHECK(std::abs(got - p.f(x)) < 1e-3 * std::max(std::abs(p.f(x)), 0.05 * scale));
        }
    }
}

TEST_CASE("structured forcing terms sum to the plain forcing") {
    for (auto [ex, alpha] : {std::pair{1, 1.6}, {2, 1.4}}) {
        const ProblemSpec p = ex == 1 ? example1(alpha, 0.5) : example2(alpha, 0.5);
        REQUIRE(p.f_terms.size() == 2);
        for (double x : {0.05, 0.3, 0.6, 0.92}) {
            double sum = 0.0;
            for (const auto& t : p.f_terms)
                sum += std::pow(x, t.x_exp) * std::pow(1.0 - x, t.omx_exp) * t.factor(x);
            CHECK(rel_err(sum, p.f(x)) < 1e-13);
        }
    }
}

TEST_CASE("exact u closes the loop through the constrained flux") {
    // -int_0^x (c_-2 k + q)/K with c_-2 from the constraint reproduces u
    const double alpha = 1.6;
    const double r = r_from_beta(alpha, 0.85);
    const double beta = beta_from_r(alpha, r);
    const ProblemSpec p = example1(alpha, r);
    // c_-2 = -int q / int k (K = 1), both by quadrature
    const QuadratureRule leg = gauss_jacobi(64, {0.0, 0.0});
    const double int_q = integrate(leg, p.exact_q);
    const double int_k = complete_beta(beta, alpha - beta);
    const double c2 = -int_q / int_k;
    for (int i = 1; i <= 9; ++i) {
        const double x = 0.1 * i;
        // int_0^x q via a mapped smooth rule; int_0^x k via the incomplete beta
        const double iq = x * integrate(leg, [&](double t) { return p.exact_q(x * t); });
        const double u = -(c2 * incomplete_beta(x, beta, alpha - beta) + iq);
        CHECK(std::abs(u - p.exact_u(x)) < 1e-8);
    }
}

TEST_CASE("reflection maps problems consistently") {
    const ProblemSpec p = example2(1.6, r_from_beta(1.6, 0.85));
    const ProblemSpec m = reflect(p);
    CHECK(m.r == 1.0 - p.r);
    for (double x : {0.2, 0.7}) {
        CHECK(m.K(x) == p.K(1.0 - x));
        CHECK(m.f(x) == p.f(1.0 - x));
        CHECK(m.exact_u(x) == p.exact_u(1.0 - x));
        CHECK(m.exact_q(x) == -p.exact_q(1.0 - x));
    }
    // structured terms mirror with swapped exponents
    double sum = 0.0;
    const double x = 0.31;
    for (const auto& t : m.f_terms)
        sum += std::pow(x, t.x_exp) * std::pow(1.0 - x, t.omx_exp) * t.factor(x);
    CHECK(rel_err(sum, p.f(1.0 - x)) < 1e-13);
    // coefficient tables pick up the alternating sign
    ProblemSpec tp;
    tp.alpha = 1.5;
    tp.r = 0.4;
    tp.f_coeff_table = {1.0, 2.0, 3.0, 4.0};
    const ProblemSpec tm = reflect(tp);
    CHECK(tm.f_coeff_table == std::vector<double>{1.0, -2.0, 3.0, -4.0});
}

TEST_CASE("expression grammar") {
    CHECK(expr::compile("2*x^2 - 1", 1)(0.5) == -0.5);
    CHECK(expr::compile("(1+x)*(1-x)", 1)(0.25) == (1.25 * 0.75));
    CHECK(std::abs(expr::compile("x^0.5", 1)(0.49) - 0.7) < 1e-15);
    CHECK(expr::compile("-x^2", 1)(3.0) == -9.0);       // unary minus binds outside '^'
    CHECK(expr::compile("2^3^2", 1)(0.0) == 512.0);     // right-associative
    CHECK(expr::compile("1 - 2 - 3", 1)(0.0) == -4.0);  // left-associative
    CHECK(expr::compile("6/3/2", 1)(0.0) == 1.0);
    CHECK_THROWS_AS(expr::compile("2*", 3), parse_error);
    CHECK_THROWS_AS(expr::compile("(1+x", 1), parse_error);
    CHECK_THROWS_AS(expr::compile("y+1", 1), parse_error);
    try {
        expr::compile("1 + $", 7);
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        CHECK(e.line() == 7);
        CHECK(e.column() == 5);
    }
}

TEST_CASE("load_problem: minimal file") {
    const fs::path path = write_temp("fdespec_prob_min.txt",
                                     "# trivial problem\n"
                                     "alpha = 1.5\n"
                                     "r = 0.5\n"
                                     "K = 1\n"
                                     "f = 1\n");
    const ProblemSpec p = load_problem(path);
    CHECK(p.alpha == 1.5);
    CHECK(p.r == 0.5);
    CHECK(p.K_is_constant);
    CHECK(p.K_min == 1.0);
    CHECK(p.f(0.37) == 1.0);
    CHECK(!p.exact_u);
    fs::remove(path);
}

TEST_CASE("load_problem: example-2 fields round-trip") {
    const double alpha = 1.6, r = 0.5;
    const ProblemSpec builtin = example2(alpha, r);
    char buf[1024];
    auto g = [&](double k) { return std::exp(log_gamma(k - alpha)); };
    std::snprintf(buf, sizeof buf,
                  "alpha = 1.6\n"
                  "r = 0.5\n"
                  "K = 1 + x^2\n"
                  "exact_u = x^2*(1-x)^2\n"
                  "exact_q = -2*(1+x^2)*x*(1-x)*(1-2*x)\n"
                  "f = x^%.17g * %.17g * (-480*x^4/%.17g + 144*x^3/%.17g - 36*x^2/%.17g"
                  " + 12*x/%.17g - 2/%.17g)"
                  " + (1-x)^%.17g * %.17g * (-(480*(1-x)^4/%.17g - 336*(1-x)^3/%.17g"
                  " + 132*(1-x)^2/%.17g - 32*(1-x)/%.17g + 4/%.17g))\n",
                  2.0 - alpha, r, g(7), g(6), g(5), g(4), g(3), 2.0 - alpha, 1.0 - r, g(7),
                  g(6), g(5), g(4), g(3));
    const fs::path path = write_temp("fdespec_prob_ex2.txt", buf);
    const ProblemSpec p = load_problem(path);
    CHECK(!p.K_is_constant);
    CHECK(std::abs(p.K_min - 1.0) < 1e-12);
    CHECK(std::abs(p.K_max - 2.0) < 1e-12);
    for (int i = 1; i <= 10; ++i) {
        const double x = i / 11.0;
        CHECK(std::abs(p.f(x) - builtin.f(x)) <= 1e-12 * std::max(1.0, std::abs(builtin.f(x))));
        CHECK(std::abs(p.exact_u(x) - builtin.exact_u(x)) < 1e-15);
        CHECK(std::abs(p.exact_q(x) - builtin.exact_q(x)) < 1e-15);
    }
    fs::remove(path);
}

TEST_CASE("load_problem: beta key and coefficient tables") {
    const fs::path coeffs = write_temp("fdespec_coeffs.txt",
                                       "# i f_i\n"
                                       "0 0.5\n"
                                       "2 -0.25\n");
    const fs::path path = write_temp("fdespec_prob_beta.txt",
                                     "alpha = 1.6\n"
                                     "beta = 0.8\n"
                                     "K = 2\n"
                                     "f_coeffs_path = fdespec_coeffs.txt\n");
    const ProblemSpec p = load_problem(path);
    CHECK(std::abs(p.r - 0.5) < 1e-13);  // beta = alpha/2
    REQUIRE(p.f_coeff_table.size() == 3);
    CHECK(p.f_coeff_table[0] == 0.5);
    CHECK(p.f_coeff_table[1] == 0.0);
    CHECK(p.f_coeff_table[2] == -0.25);
    // solvable without a callable f
    const SpectralSolution sol = solve(p, 6);
    CHECK(std::isfinite(eval_uN(sol, 0.5)));
    fs::remove(path);
    fs::remove(coeffs);
}

TEST_CASE("load_problem: rejections") {
    const fs::path neg = write_temp("fdespec_prob_neg.txt",
                                    "alpha = 1.5\nr = 0.5\nK = x - 0.5\nf = 1\n");
    CHECK_THROWS_AS(load_problem(neg), config_error);  // K positivity screen
    fs::remove(neg);

    const fs::path both = write_temp("fdespec_prob_both.txt",
                                     "alpha = 1.5\nr = 0.5\nbeta = 0.75\nK = 1\nf = 1\n");
    CHECK_THROWS_AS(load_problem(both), config_error);
    fs::remove(both);

    const fs::path noalpha = write_temp("fdespec_prob_noalpha.txt", "r = 0.5\nK = 1\nf = 1\n");
    CHECK_THROWS_AS(load_problem(noalpha), config_error);
    fs::remove(noalpha);

    const fs::path badkey = write_temp("fdespec_prob_badkey.txt",
                                       "alpha = 1.5\nr = 0.5\nK = 1\nf = 1\nseed = 3\n");
    CHECK_THROWS_AS(load_problem(badkey), parse_error);
    fs::remove(badkey);

    const fs::path badexpr = write_temp("fdespec_prob_badexpr.txt",
                                        "alpha = 1.5\nr = 0.5\nK = 1\nf = 2*\n");
    try {
        load_problem(badexpr);
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        CHECK(e.line() == 4);
    }
    fs::remove(badexpr);

    CHECK_THROWS_AS(load_problem(fs::temp_directory_path() / "fdespec_nonexistent.txt"),
                    io_error);
}
