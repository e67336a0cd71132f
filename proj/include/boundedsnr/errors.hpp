#pragma once

#include <stdexcept>
#include <string>

namespace snr {

/// Argument outside the mathematical domain of an operation (negative z, s2 <= 0, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// An invalid problem/estimator configuration, e.g. l >= k + p.
class ConfigurationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A series that failed to converge or overflowed; carries the offending arguments.
class EvaluationError : public std::runtime_error {
public:
    EvaluationError(const std::string& what, double a, double b, double z)
        : std::runtime_error(what + " (a=" + std::to_string(a) + ", b=" + std::to_string(b) +
                             ", z=" + std::to_string(z) + ")"),
          a_(a), b_(b), z_(z) {}

    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    double z() const noexcept { return z_; }

private:
    double a_;
    double b_;
    double z_;
};

}  // namespace snr
