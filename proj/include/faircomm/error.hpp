#pragma once

#include <stdexcept>
#include <string>

namespace faircomm {

// Malformed input text (edge lists, partition files, config files).
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Inputs that parse but violate a precondition: node-set mismatch,
// partition coverage, out-of-range indices.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A quantity that is mathematically undefined for the given input
// (zero variance, zero volume).
class UndefinedValue : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Generator or experiment configuration that cannot be satisfied.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace faircomm
