// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace accrual {

// Error classes surfaced to callers and encoded in the CLI's JSON error
// object.
enum class ErrorKind { domain, model, numerical, data, parse, request };

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Out-of-range argument to a density or probability.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what)
        : Error(ErrorKind::domain, what) {}
};

// The model cannot be fitted to the data (e.g. improper posterior).
class ModelError : public Error {
public:
    explicit ModelError(const std::string& what)
        : Error(ErrorKind::model, what) {}
};

class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what)
        : Error(ErrorKind::numerical, what) {}
};

class DataError : public Error {
public:
    explicit DataError(const std::string& what)
        : Error(ErrorKind::data, what) {}
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error(ErrorKind::parse, "line " + std::to_string(line) + ": " + what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class RequestError : public Error {
public:
    explicit RequestError(const std::string& what)
        : Error(ErrorKind::request, what) {}
};

}  // namespace accrual
