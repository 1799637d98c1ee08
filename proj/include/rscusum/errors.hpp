#pragma once

#include <stdexcept>
#include <string>

namespace rscusum {

// Error taxonomy used across the library. The CLI maps these onto exit
// codes (config -> 2, data -> 3, numeric -> 4).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input text (CSV rows, model files, config values).
class ParseError : public Error {
public:
    using Error::Error;
};

// Structurally valid input that violates an invariant (negative rate,
// coverage hole, schema mismatch).
class ValidationError : public Error {
public:
    using Error::Error;
};

// Evaluation outside the domain of a table or baseline (no silent
// extrapolation anywhere in the library).
class RangeError : public Error {
public:
    using Error::Error;
};

// A chart or simulation set-up that cannot be computed with the given
// model support; raised before any computation starts.
class SupportError : public Error {
public:
    using Error::Error;
};

// Inconsistent run configuration (flags, spec fields, empty pools).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Numerical failure during computation (non-finite values, zero hazard
// at an observed event, non-convergence when not tolerated).
class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace rscusum
