#pragma once

#include <stdexcept>
#include <string>

namespace stockout {

/// Argument outside the mathematical domain of a function or model.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// An iterative evaluation did not reach its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical result that violates its contract (e.g. a probability
/// far outside [0,1]).
class ComputationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent user input (files, flags, series).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace stockout
