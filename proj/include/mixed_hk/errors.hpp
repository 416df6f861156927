#pragma once

#include <stdexcept>
#include <string>

namespace mixed_hk {

/// Bad configuration, malformed input or mismatched dimensions.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A table schedule was queried past its last row.
class ScheduleExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Caller violated a documented precondition.
class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Exhaustive routine refused an input that is too large.
class SizeLimitError : public std::length_error {
public:
    using std::length_error::length_error;
};

/// An iterative method hit its iteration cap.
class NumericalFailure : public std::runtime_error {
public:
    NumericalFailure(const std::string& what, double best_value, double gap_bound)
        : std::runtime_error(what), best_value_(best_value), gap_bound_(gap_bound) {}

    double best_value() const noexcept { return best_value_; }
    double gap_bound() const noexcept { return gap_bound_; }

private:
    double best_value_;
    double gap_bound_;
};

/// Persisted file failed validation (truncation, bad row, version mismatch).
class IntegrityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mixed_hk
