#pragma once

// Benchmark problems with exact solutions, user-defined problem ingestion,
// and the x -> 1-x reflection that reduces r < 1/2 to the r >= 1/2 case.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fdespec/errors.hpp"
#include "fdespec/spectral_params.hpp"
#include "fdespec/specfun.hpp"

namespace fdespec {

// One piece of a forcing function with explicit endpoint exponents:
//   x^x_exp * (1-x)^omx_exp * factor(x),  factor smooth on [0,1].
// Carrying the decomposition lets the coefficient quadrature absorb the
// endpoint singularities into matched Jacobi weights (exact for polynomial
// factors), which plain quadrature of the assembled f cannot do.
struct SingularTerm {
    double x_exp{};
    double omx_exp{};
    std::function<double(double)> factor;
};

struct ProblemSpec {
    double alpha{};
    double r{};

    std::function<double(double)> K;  // diffusivity, K_min <= K <= K_max
    double K_min{};
    double K_max{};
    bool K_is_constant{};

    std::function<double(double)> f;      // right-hand side
    std::vector<SingularTerm> f_terms;    // optional structured decomposition of f
    std::vector<double> f_coeff_table;    // optional preset Fourier-Jacobi coefficients

    std::function<double(double)> exact_u;  // optional (null when absent)
    std::function<double(double)> exact_q;  // optional
};

// Example with K = 1: exact flux q(x) = -6x + 6x^2 and exact solution
// u(x) = 3x^2 - 2x^3 - x^beta 2F1(beta+1-alpha, beta; beta+1; x) / (same at 1).
inline ProblemSpec example1(double alpha, double r) {
    ProblemSpec p;
    p.alpha = alpha;
    p.r = r;
    p.K = [](double) { return 1.0; };
    p.K_min = p.K_max = 1.0;
    p.K_is_constant = true;

    const double delta = alpha * alpha * alpha - 9.0 * alpha * alpha + 26.0 * alpha - 24.0;
    const double g2a = std::exp(log_gamma(2.0 - alpha));
    const double c_left = 6.0 * r / (g2a * delta);
    const double c_right = 6.0 * (1.0 - r) / (g2a * delta);
    const double lin = 2.0 * alpha - 8.0;
    const double con = (alpha - 3.0) * (alpha - 4.0);

    p.f_terms = {
        {2.0 - alpha, 0.0, [=](double x) { return c_left * (lin * x + con); }},
        {0.0, 2.0 - alpha, [=](double x) { return c_right * (-lin * (1.0 - x) - con); }},
    };
    p.f = [=](double x) {
        return std::pow(x, 2.0 - alpha) * c_left * (lin * x + con)
               + std::pow(1.0 - x, 2.0 - alpha) * c_right * (-lin * (1.0 - x) - con);
    };

    const double beta = beta_from_r(alpha, r);
    const double a2f1 = beta + 1.0 - alpha, b2f1 = beta, c2f1 = beta + 1.0;
    const double denom = hyp2f1(a2f1, b2f1, c2f1, 1.0);
    p.exact_u = [=](double x) {
        return 3.0 * x * x - 2.0 * x * x * x
               - std::pow(x, beta) * hyp2f1(a2f1, b2f1, c2f1, x) / denom;
    };
    p.exact_q = [](double x) { return -6.0 * x + 6.0 * x * x; };
    return p;
}

// Example with K = 1 + x^2: exact u(x) = x^2 (1-x)^2 and exact flux
// q(x) = -2 (1+x^2) x (1-x) (1-2x).  The forcing is the image of q under the
// two-sided flux operator; the (1-x)^(5-alpha) coefficient below is 336
// (= 14 * 4!), which the operator-consistency tests pin down.
inline ProblemSpec example2(double alpha, double r) {
    ProblemSpec p;
    p.alpha = alpha;
    p.r = r;
    p.K = [](double x) { return 1.0 + x * x; };
    p.K_min = 1.0;
    p.K_max = 2.0;
    p.K_is_constant = false;

    const double g3 = std::exp(log_gamma(3.0 - alpha));
    const double g4 = std::exp(log_gamma(4.0 - alpha));
    const double g5 = std::exp(log_gamma(5.0 - alpha));
    const double g6 = std::exp(log_gamma(6.0 - alpha));
    const double g7 = std::exp(log_gamma(7.0 - alpha));
    auto left_poly = [=](double x) {
        return -480.0 * x * x * x * x / g7 + 144.0 * x * x * x / g6 - 36.0 * x * x / g5
               + 12.0 * x / g4 - 2.0 / g3;
    };
    auto right_poly = [=](double x) {
        const double v = 1.0 - x;
        return -(480.0 * v * v * v * v / g7 - 336.0 * v * v * v / g6 + 132.0 * v * v / g5
                 - 32.0 * v / g4 + 4.0 / g3);
    };
    p.f_terms = {
        {2.0 - alpha, 0.0, [=](double x) { return r * left_poly(x); }},
        {0.0, 2.0 - alpha, [=](double x) { return (1.0 - r) * right_poly(x); }},
    };
    p.f = [=](double x) {
        return std::pow(x, 2.0 - alpha) * r * left_poly(x)
               + std::pow(1.0 - x, 2.0 - alpha) * (1.0 - r) * right_poly(x);
    };
    p.exact_u = [](double x) { return x * x * (1.0 - x) * (1.0 - x); };
    p.exact_q = [](double x) {
        return -2.0 * (1.0 + x * x) * x * (1.0 - x) * (1.0 - 2.0 * x);
    };
    return p;
}

// Mirror x -> 1-x: swaps r with 1-r and the left/right operators.  The flux
// picks up a sign (q_mirror(y) = -q(1-y)); u and K mirror without sign.
// A preset coefficient table maps as f_i -> (-1)^i f_i.
inline ProblemSpec reflect(const ProblemSpec& p) {
    ProblemSpec q;
    q.alpha = p.alpha;
    q.r = 1.0 - p.r;
    q.K = [K = p.K](double y) { return K(1.0 - y); };
    q.K_min = p.K_min;
    q.K_max = p.K_max;
    q.K_is_constant = p.K_is_constant;
    if (p.f) q.f = [f = p.f](double y) { return f(1.0 - y); };
    for (const auto& t : p.f_terms)
        q.f_terms.push_back({t.omx_exp, t.x_exp,
                             [fac = t.factor](double y) { return fac(1.0 - y); }});
    q.f_coeff_table = p.f_coeff_table;
    for (size_t i = 1; i < q.f_coeff_table.size(); i += 2)
        q.f_coeff_table[i] = -q.f_coeff_table[i];
    if (p.exact_u) q.exact_u = [u = p.exact_u](double y) { return u(1.0 - y); };
    if (p.exact_q) q.exact_q = [qe = p.exact_q](double y) { return -qe(1.0 - y); };
    return q;
}

// ---------------------------------------------------------------------------
// Minimal arithmetic expressions for problem files: +, -, *, /, ^, x,
// numeric constants, parentheses.  '^' binds tightest and associates right.
// ---------------------------------------------------------------------------
namespace expr {

struct Node {
    virtual ~Node() = default;
    virtual double eval(double x) const = 0;
};
using NodePtr = std::shared_ptr<const Node>;

struct Const final : Node {
    double v;
    explicit Const(double v) : v(v) {}
    double eval(double) const override { return v; }
};
struct Var final : Node {
    double eval(double x) const override { return x; }
};
struct Binary final : Node {
    char op;
    NodePtr lhs, rhs;
    Binary(char op, NodePtr l, NodePtr r) : op(op), lhs(std::move(l)), rhs(std::move(r)) {}
    double eval(double x) const override {
        const double a = lhs->eval(x), b = rhs->eval(x);
        switch (op) {
            case '+': return a + b;
            case '-': return a - b;
            case '*': return a * b;
            case '/': return a / b;
            default: return std::pow(a, b);
        }
    }
};
struct Negate final : Node {
    NodePtr inner;
    explicit Negate(NodePtr n) : inner(std::move(n)) {}
    double eval(double x) const override { return -inner->eval(x); }
};

class Parser {
public:
    Parser(std::string text, int line) : text_(std::move(text)), line_(line) {}

    NodePtr parse() {
        NodePtr e = parse_sum();
        skip_ws();
        if (pos_ != text_.size()) fail("trailing characters in expression");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw parse_error(msg, line_, static_cast<int>(pos_) + 1);
    }
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }
    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    NodePtr parse_sum() {
        NodePtr lhs = parse_product();
        for (;;) {
            if (eat('+'))
                lhs = std::make_shared<Binary>('+', lhs, parse_product());
            else if (eat('-'))
                lhs = std::make_shared<Binary>('-', lhs, parse_product());
            else
                return lhs;
        }
    }
    NodePtr parse_product() {
        NodePtr lhs = parse_unary();
        for (;;) {
            if (eat('*'))
                lhs = std::make_shared<Binary>('*', lhs, parse_unary());
            else if (eat('/'))
                lhs = std::make_shared<Binary>('/', lhs, parse_unary());
            else
                return lhs;
        }
    }
    NodePtr parse_unary() {
        if (eat('-')) return std::make_shared<Negate>(parse_unary());
        if (eat('+')) return parse_unary();
        return parse_power();
    }
    NodePtr parse_power() {
        NodePtr base = parse_atom();
        if (eat('^')) return std::make_shared<Binary>('^', base, parse_unary());
        return base;
    }
    NodePtr parse_atom() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of expression");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr inner = parse_sum();
            if (!eat(')')) fail("missing ')'");
            return inner;
        }
        if (c == 'x' || c == 'X') {
            ++pos_;
            return std::make_shared<Var>();
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t used = 0;
            double v;
            try {
                v = std::stod(text_.substr(pos_), &used);
            } catch (const std::exception&) {
                fail("malformed number");
            }
            pos_ += used;
            return std::make_shared<Const>(v);
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    std::string text_;
    size_t pos_ = 0;
    int line_;
};

inline std::function<double(double)> compile(const std::string& text, int line) {
    NodePtr root = Parser(text, line).parse();
    return [root](double x) { return root->eval(x); };
}

}  // namespace expr

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<double> read_coeff_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open coefficient table " + path.string());
    std::vector<double> table;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::istringstream iss(t);
        long i;
        double v;
        if (!(iss >> i >> v) || i < 0)
            throw parse_error("coefficient table line must be 'i f_i'", lineno, 1);
        if (static_cast<size_t>(i) >= table.size()) table.resize(static_cast<size_t>(i) + 1, 0.0);
        table[static_cast<size_t>(i)] = v;
    }
    return table;
}

}  // namespace detail

// Line-oriented `key = value` problem file.  Keys: alpha, r, beta, K, f,
// exact_u, exact_q, f_coeffs_path.  Exactly one of r/beta is required; K and
// f (or a coefficient table) are mandatory.  K is screened for positivity on
// a 1001-point grid, which also supplies the stored bounds.
inline ProblemSpec load_problem(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open problem file " + path.string());

    std::optional<double> alpha, r, beta;
    std::optional<std::string> k_text, f_text, u_text, q_text, coeffs_path;
    std::optional<int> k_line, f_line, u_line, q_line;

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw parse_error("expected 'key = value'", lineno, 1);
        const std::string key = detail::trim(t.substr(0, eq));
        const std::string val = detail::trim(t.substr(eq + 1));
        if (val.empty()) throw parse_error("empty value for key '" + key + "'", lineno,
                                           static_cast<int>(eq) + 2);
        auto as_number = [&]() {
            try {
                size_t used = 0;
                const double v = std::stod(val, &used);
                if (used != val.size()) throw std::invalid_argument("");
                return v;
            } catch (const std::exception&) {
                throw parse_error("numeric value expected for '" + key + "'", lineno,
                                  static_cast<int>(eq) + 2);
            }
        };
        if (key == "alpha") alpha = as_number();
        else if (key == "r") r = as_number();
        else if (key == "beta") beta = as_number();
        else if (key == "K") { k_text = val; k_line = lineno; }
        else if (key == "f") { f_text = val; f_line = lineno; }
        else if (key == "exact_u") { u_text = val; u_line = lineno; }
        else if (key == "exact_q") { q_text = val; q_line = lineno; }
        else if (key == "f_coeffs_path") coeffs_path = val;
        else throw parse_error("unknown key '" + key + "'", lineno, 1);
    }

    if (!alpha) throw config_error(path.string() + ": missing mandatory key 'alpha'");
    if (!(*alpha > 1.0 && *alpha < 2.0))
        throw config_error(path.string() + ": alpha must lie in (1,2)");
    if (r.has_value() == beta.has_value())
        throw config_error(path.string() + ": exactly one of r/beta is required");
    if (!k_text) throw config_error(path.string() + ": missing mandatory key 'K'");
    if (!f_text && !coeffs_path)
        throw config_error(path.string() + ": need 'f' or 'f_coeffs_path'");

    ProblemSpec p;
    p.alpha = *alpha;
    p.r = r ? *r : r_from_beta(*alpha, *beta);
    if (!(p.r >= 0.0 && p.r <= 1.0))
        throw config_error(path.string() + ": r must lie in [0,1]");

    p.K = expr::compile(*k_text, *k_line);
    double kmin = std::numeric_limits<double>::infinity(), kmax = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        const double v = p.K(i / 1000.0);
        if (!std::isfinite(v) || v <= 0.0)
            throw config_error(path.string() + ": K fails the positivity screen at x = "
                               + std::to_string(i / 1000.0));
        kmin = std::min(kmin, v);
        kmax = std::max(kmax, v);
    }
    p.K_min = kmin;
    p.K_max = kmax;
    p.K_is_constant = (kmin == kmax);

    if (f_text) p.f = expr::compile(*f_text, *f_line);
    if (coeffs_path) {
        std::filesystem::path cp(*coeffs_path);
        if (cp.is_relative()) cp = path.parent_path() / cp;
        p.f_coeff_table = detail::read_coeff_table(cp);
    }
    if (u_text) p.exact_u = expr::compile(*u_text, *u_line);
    if (q_text) p.exact_q = expr::compile(*q_text, *q_line);
    return p;
}

}  // namespace fdespec
