#pragma once

#include <stdexcept>
#include <string>

namespace polytree {

// Base for every error raised by the library. The CLI maps the concrete
// subclasses onto process exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller violated a documented precondition (bad order, i == j, p < 2, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Input data or file contents are malformed or numerically unusable.
class DataError : public Error {
public:
    using Error::Error;
};

// Population rank test could not decide an orientation: both minor vectors
// vanish (Gaussian-like model) or neither does (table not polytree-consistent).
class DegeneracyError : public Error {
public:
    using Error::Error;
};

} // namespace polytree
