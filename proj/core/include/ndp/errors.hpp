#ifndef NDP_ERRORS_HPP
#define NDP_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ndp {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input data or configuration. Messages for file input carry
/// "<file>:<line>:" prefixes so the CLI can surface the offending record.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Operands with incompatible shapes.
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// A matrix inversion hit a pivot below the singularity threshold.
/// `pivot_column` is the column whose pivot failed.
class SingularMatrix : public Error {
public:
    SingularMatrix(const std::string& what, std::size_t pivot_column)
        : Error(what), pivot_column(pivot_column) {}

    std::size_t pivot_column;
};

/// Stochastic gradient descent produced a non-finite loss.
class TrainingDiverged : public Error {
public:
    TrainingDiverged(const std::string& what, int epoch)
        : Error(what), epoch(epoch) {}

    int epoch;
};

} // namespace ndp

#endif
