#ifndef INRLAB_ERRORS_HPP
#define INRLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace inrlab {

// Base class for everything thrown by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad arguments to an operation (dimension mismatch, empty input, ...).
struct ArgumentError : Error {
    using Error::Error;
};

// Invalid model/experiment configuration (maps to CLI exit code 2).
struct ConfigError : Error {
    using Error::Error;
};

// Malformed file content; message carries line/field or byte context.
struct ParseError : Error {
    using Error::Error;
};

// Argument outside the supported numeric domain.
struct DomainError : Error {
    using Error::Error;
};

// Model does not have the architecture an analysis requires.
struct ShapeError : Error {
    using Error::Error;
};

// Numerical failure (non-convergence, degenerate spectrum, ...);
// maps to CLI exit code 3.
struct NumericError : Error {
    using Error::Error;
};

// Training loss became non-finite or exceeded the divergence guard.
struct DivergenceError : NumericError {
    long iteration;
    DivergenceError(const std::string& msg, long iter)
        : NumericError(msg), iteration(iter) {}
};

// A requested computation exceeds the configured size/memory budget.
struct ResourceError : Error {
    using Error::Error;
};

// Least-squares fit could not be carried out (rank-deficient design).
struct FitError : Error {
    using Error::Error;
};

// Filesystem-level failure (missing path, unwritable directory).
struct IoError : Error {
    using Error::Error;
};

} // namespace inrlab

#endif
