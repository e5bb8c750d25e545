// error.hpp
// Exception types shared by the mvmag library.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mvmag {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed price table. `row` is the 1-based line number in the input,
// `column` the header name of the offending cell (empty when not cell-specific).
struct ParseError : Error {
    ParseError(const std::string& what, std::size_t row, std::string column = {})
        : Error(location(row, column) + what), row(row), column(std::move(column)) {}

    std::size_t row;
    std::string column;

private:
    static std::string location(std::size_t row, const std::string& column) {
        std::string s = "line " + std::to_string(row);
        if (!column.empty()) s += ", column '" + column + "'";
        return s + ": ";
    }
};

struct InvalidArgument : Error {
    using Error::Error;
};

struct InsufficientHistory : Error {
    using Error::Error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct BudgetViolation : Error {
    BudgetViolation(const std::string& what, double l1) : Error(what), l1_norm(l1) {}
    double l1_norm;
};

struct NonPsdCovariance : Error {
    using Error::Error;
};

struct SolverError : Error {
    using Error::Error;
};

}  // namespace mvmag
