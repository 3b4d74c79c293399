#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace vtmv {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: bad schedules, mismatched dimensions, unparseable specs.
class StructuralError : public Error {
public:
    using Error::Error;
};

/// Argument outside the domain of an operation (negative time, t > tau, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A model assumption (positivity of rates, non-degenerate diffusion,
/// target above the bond) does not hold for the inputs.
class AssumptionError : public Error {
public:
    using Error::Error;
};

/// An operation was called on a model it does not support
/// (e.g. the closed-form payoff outside the 1-D constant market).
class UnsupportedModelError : public Error {
public:
    using Error::Error;
};

/// Numerical search failed: no sign change of the objective within the horizon,
/// too many non-finite simulation paths.
class NumericError : public Error {
public:
    using Error::Error;
};

/// An operation was called outside its stated precondition
/// (e.g. root search on a model without a finite optimum).
class PreconditionError : public Error {
public:
    using Error::Error;
};

class HorizonExceededError : public NumericError {
public:
    using NumericError::NumericError;
};

enum class ViolationKind {
    NonPositiveRate,
    NonPositiveExcessReturn,
    DegenerateDiffusion,
    NonPositiveWealth,
    TargetNotAboveBond,
    NonPositiveThetaRate,
};

struct Violation {
    ViolationKind kind;
    std::size_t segment = 0;
    std::string message;
};

/// Outcome of checking model assumptions. Empty `violations` means valid.
struct ValidationReport {
    std::vector<Violation> violations;
    /// Human-readable notes that are not violations (e.g. a numerically
    /// approximated derivative was used while building a target).
    std::vector<std::string> notes;
    bool derivative_approximated = false;

    [[nodiscard]] bool ok() const noexcept { return violations.empty(); }

    [[nodiscard]] bool has(ViolationKind kind) const noexcept {
        for (const auto& v : violations) {
            if (v.kind == kind) return true;
        }
        return false;
    }

    void merge(const ValidationReport& other) {
        violations.insert(violations.end(), other.violations.begin(), other.violations.end());
        notes.insert(notes.end(), other.notes.begin(), other.notes.end());
        derivative_approximated = derivative_approximated || other.derivative_approximated;
    }
};

}  // namespace vtmv
