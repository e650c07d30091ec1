#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace betaf {

enum class ErrorKind {
    domain,
    numeric,
    nonexistence,
    parse,
    schema,
    io,
    fit,
    metric,
};

// Base of every exception thrown by the library. The C API maps kind() onto
// its status codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(ErrorKind::domain, what) {}
};

// Iterative method gave up; carries the last iterate it reached.
class NumericError : public Error {
public:
    NumericError(const std::string& what, double last_iterate)
        : Error(ErrorKind::numeric, what), last_iterate_(last_iterate) {}
    double last_iterate() const noexcept { return last_iterate_; }

private:
    double last_iterate_;
};

// A requested moment does not exist (heavy tail) or its integral diverged.
class NonexistenceError : public Error {
public:
    explicit NonexistenceError(const std::string& what) : Error(ErrorKind::nonexistence, what) {}
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(ErrorKind::parse, "line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class SchemaError : public Error {
public:
    explicit SchemaError(const std::string& what) : Error(ErrorKind::schema, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

class FitError : public Error {
public:
    explicit FitError(const std::string& what) : Error(ErrorKind::fit, what) {}
};

class MetricError : public Error {
public:
    MetricError(const std::string& what, std::size_t cell) : Error(ErrorKind::metric, what), cell_(cell) {}
    std::size_t cell() const noexcept { return cell_; }

private:
    std::size_t cell_;
};

}  // namespace betaf
