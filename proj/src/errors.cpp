#include "tracebounds/errors.hpp"

#include <sstream>

namespace tracebounds {

namespace {

std::string format(const char* prefix, double value) {
    std::ostringstream os;
    os.precision(17);
    os << prefix << value;
    return os.str();
}

} // namespace

NotPositiveDefinite::NotPositiveDefinite(std::size_t pivot, double value)
    : Error(format(("not positive definite: pivot " + std::to_string(pivot) + " is ").c_str(), value)),
      pivot_(pivot), value_(value) {}

RankDeficient::RankDeficient(std::size_t column, double diagonal)
    : Error(format(("rank deficient at column " + std::to_string(column) + ": |R_kk| = ").c_str(),
                   diagonal)),
      column_(column) {}

SpectrumError::SpectrumError(const std::string& function, double value)
    : Error(format(("spectrum outside domain of " + function + ": offending value ").c_str(), value)),
      value_(value) {}

CertificateError::CertificateError(double achieved, double bound)
    : Error(format("accuracy certificate failed: achieved ", achieved) + format(" > bound ", bound)),
      achieved_(achieved), bound_(bound) {}

BudgetExceeded::BudgetExceeded(std::size_t budget)
    : Error("query budget of " + std::to_string(budget) + " matrix-vector products exceeded"),
      budget_(budget) {}

ParseError::ParseError(const std::string& what, std::size_t line)
    : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

} // namespace tracebounds
