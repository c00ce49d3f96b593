#pragma once

#include <stdexcept>
#include <string>

namespace ivreg {

/// Malformed input: dimension mismatch, invalid parameter, broken invariant of
/// a value type. Corresponds to exit code 2 in the CLI.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Distance between sets is undefined when one of them is empty.
class EmptySetError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// An optimisation step that cannot proceed (infeasible/unbounded LP inside a
/// pipeline that requires an optimum, missing source condition, ...).
class SolveError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ivreg
