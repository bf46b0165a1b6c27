#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace adastrat {

// Invalid inputs to a public operation (bad axis, bad sizes, bad config).
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A rectangle whose volume numerator is 1 cannot be split on the rational grid.
class IndivisibleError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A quantity that must be positive turned out to be zero (e.g. Delta(R) = 0).
class DegenerateError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class UnsupportedError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double final_gradient_norm)
        : std::runtime_error(what), gradient_norm(final_gradient_norm) {}
    double gradient_norm;
};

class LinearAlgebraError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line_number)
        : std::runtime_error(what + " (line " + std::to_string(line_number) + ")"), line(line_number) {}
    std::size_t line;
};

}  // namespace adastrat
