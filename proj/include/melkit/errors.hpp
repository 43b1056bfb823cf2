#ifndef MELKIT_ERRORS_HPP
#define MELKIT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace melkit {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// A resonance condition has no solution in the admissible parameter range.
class NoResonanceError : public DomainError {
public:
    explicit NoResonanceError(const std::string& what) : DomainError(what) {}
};

/// Numerical procedure failed (step-size underflow, tail bound unreachable, ...).
class ComputationError : public std::runtime_error {
public:
    explicit ComputationError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace melkit

#endif
