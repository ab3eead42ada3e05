#pragma once

#include <stdexcept>
#include <string>

namespace lpg {

/// Bad or inconsistent input: files, columns, windows, parameter values.
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A function was evaluated outside its mathematical domain (e.g. t >= t_c).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// A numerical procedure could not produce a usable result.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace lpg
