#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tracebounds {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Iterative eigensolver hit its sweep cap.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class NotPositiveDefinite : public Error {
public:
    NotPositiveDefinite(std::size_t pivot, double value);
    std::size_t pivot() const noexcept { return pivot_; }
    double value() const noexcept { return value_; }

private:
    std::size_t pivot_;
    double value_;
};

class RankDeficient : public Error {
public:
    /// `column` is 1-based.
    RankDeficient(std::size_t column, double diagonal);
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t column_;
};

/// A Ritz value or eigenvalue fell outside the domain of the requested function.
class SpectrumError : public Error {
public:
    SpectrumError(const std::string& function, double value);
    double value() const noexcept { return value_; }

private:
    double value_;
};

/// A constructed polynomial failed its own sup-norm certificate.
class CertificateError : public Error {
public:
    CertificateError(double achieved, double bound);
    double achieved() const noexcept { return achieved_; }
    double bound() const noexcept { return bound_; }

private:
    double achieved_;
    double bound_;
};

class BudgetExceeded : public Error {
public:
    explicit BudgetExceeded(std::size_t budget);
    std::size_t budget() const noexcept { return budget_; }

private:
    std::size_t budget_;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace tracebounds
