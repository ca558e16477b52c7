#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lpsvm {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Malformed LIBSVM input. line() is 1-based, 0 when not tied to a line.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ModelFormatError : public Error {
public:
    enum class Kind { version, checksum, truncated, malformed };
    ModelFormatError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

// Raised for states that the algorithms guarantee cannot occur.
class InternalError : public Error {
public:
    using Error::Error;
};

}  // namespace lpsvm
