#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace engram {

// Error categories map 1:1 onto CLI exit codes (validation=2, io=3, remote=4).
enum class ErrorKind { validation, io, remote };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& message)
        : Error(ErrorKind::validation, message) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& message) : Error(ErrorKind::io, message) {}
};

// A recall was recorded with a timestamp earlier than the previous recall.
class ClockRegressionError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// Text produced no hashable features (empty or punctuation-only input).
class NoFeaturesError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// A log or snapshot record failed to parse. Carries the 1-based line number
// and byte offset of the offending record.
class CorruptLogError : public IoError {
public:
    CorruptLogError(const std::string& message, std::size_t line, std::int64_t offset)
        : IoError(message), line_(line), offset_(offset) {}

    std::size_t line() const noexcept { return line_; }
    std::int64_t offset() const noexcept { return offset_; }

private:
    std::size_t line_;
    std::int64_t offset_;
};

// The store on disk was written with a different embedder (model, dimension
// or hash-seed version) than the one configured now.
class FingerprintMismatchError : public IoError {
public:
    using IoError::IoError;
};

// Remote service failures, distinguished so callers can fall back locally.
class RemoteError : public Error {
public:
    enum class Kind { timeout, unreachable, http_status, bad_response, dimension_mismatch };

    RemoteError(Kind kind, const std::string& message)
        : Error(ErrorKind::remote, message), remote_kind_(kind) {}

    Kind remote_kind() const noexcept { return remote_kind_; }

private:
    Kind remote_kind_;
};

}  // namespace engram
