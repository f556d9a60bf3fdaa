#pragma once

#include <stdexcept>
#include <string>

namespace fdespec {

// Numerical process failed (non-convergence, blow-up at a node, ...).
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

// Bad run configuration (CLI flags, config/problem files, inconsistent requests).
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Problem-file parse failure; carries line/column of the offending token.
class parse_error : public config_error {
public:
    parse_error(const std::string& what, int line, int column)
        : config_error(what + " (line " + std::to_string(line) + ", column "
                       + std::to_string(column) + ")"),
          line_(line), column_(column) {}
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

// Filesystem / stream failure.
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fdespec
