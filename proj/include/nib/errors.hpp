#pragma once

#include <stdexcept>
#include <string>

namespace nib {

/// Malformed input text, invalid ids or arguments.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A fixed-point iteration did not reach its tolerance within the iteration cap.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bounded mode was forced on a graph whose loop bound is not fulfilled.
class LoopBoundError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite values, singular local systems or sign violations.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace nib
