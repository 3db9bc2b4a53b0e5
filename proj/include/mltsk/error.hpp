#pragma once

#include <stdexcept>
#include <string>

namespace mltsk {

// Bad input: shapes, ranges, invariant violations. Maps to CLI exit code 2.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Malformed file content (CSV, ARFF, model, tables). Maps to exit code 2.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnsupportedVersionError : public ParseError {
public:
    using ParseError::ParseError;
};

// Numerical breakdown: singular systems, divergence. Maps to exit code 1.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DegenerateClusterError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DivergenceError : public NumericalError {
public:
    DivergenceError(const std::string& what, int iteration)
        : NumericalError(what), iteration_(iteration) {}
    int iteration() const noexcept { return iteration_; }

private:
    int iteration_;
};

}  // namespace mltsk
