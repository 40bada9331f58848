//------------------------------------------------------------------------------
// errors.hpp
// Exception hierarchy shared across the library
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace svacov {

/// Base class for every error raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Illegal character while tokenizing; carries the byte offset.
class LexError : public Error {
public:
    LexError(const std::string& msg, std::size_t offset)
        : Error(msg + " at byte " + std::to_string(offset)), offset(offset) {}
    std::size_t offset;
};

class NodeNotFound : public Error {
public:
    using Error::Error;
};

class NotALeaf : public Error {
public:
    using Error::Error;
};

class SyntaxRequired : public Error {
public:
    using Error::Error;
};

class EmptyBatch : public Error {
public:
    using Error::Error;
};

class LengthMismatch : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class ZeroVector : public Error {
public:
    using Error::Error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class SchemaError : public Error {
public:
    using Error::Error;
};

class RangeError : public Error {
public:
    using Error::Error;
};

class AlreadyConverged : public Error {
public:
    using Error::Error;
};

/// Backend call failed. `transient` marks failures worth retrying
/// (timeouts, 5xx, rate limits).
class BackendError : public Error {
public:
    explicit BackendError(const std::string& msg, bool transient = false)
        : Error(msg), transient(transient) {}
    bool transient;
};

/// Non-retryable authentication/authorization failure.
class AuthError : public Error {
public:
    using Error::Error;
};

class EmptyResponse : public Error {
public:
    using Error::Error;
};

class GeneratorError : public Error {
public:
    using Error::Error;
};

} // namespace svacov
