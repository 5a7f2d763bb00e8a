#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gea {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class DuplicateIdError : public Error {
public:
    using Error::Error;
};

class NotFoundError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class EmptyArchiveError : public Error {
public:
    using Error::Error;
};

/// Raised while decoding newline-delimited files; carries the 1-based line.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class VersionError : public Error {
public:
    using Error::Error;
};

/// Unknown or invalid configuration key. `key()` names the offending entry.
class ConfigError : public Error {
public:
    ConfigError(std::string key, const std::string& what)
        : Error(what), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

class ReplayError : public Error {
public:
    using Error::Error;
};

}  // namespace gea
