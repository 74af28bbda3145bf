#ifndef DNR_ERROR_HPP
#define DNR_ERROR_HPP

#include <stdexcept>
#include <string>

namespace dnr {

/// Base for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent data (panel invariants, parse failures, shape mismatches).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Model formula or term configuration that cannot be honoured.
class SpecError : public Error {
public:
    using Error::Error;
};

/// Non-finite or otherwise unusable numeric input.
class InputError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Not enough prior time points to build a lag window.
class InsufficientHistory : public SpecError {
public:
    using SpecError::SpecError;
};

/// Vertex id that does not resolve against the universe.
class MappingError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

}  // namespace dnr

#endif  // DNR_ERROR_HPP
