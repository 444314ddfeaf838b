#pragma once

#include <stdexcept>
#include <string>

namespace d2drelay {

/// Input outside the mathematical domain of an operation.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A simulation window or parameter set too small to give a meaningful answer.
class DegenerateInputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Percolation estimation refused because the window holds too few crossroads.
class FiniteSizeError : public DegenerateInputError {
public:
    using DegenerateInputError::DegenerateInputError;
};

}  // namespace d2drelay
