#pragma once

#include <stdexcept>
#include <string>

namespace rc {

// Invalid construction parameters (odd half-edge count, bad degree, ...).
struct config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// API misuse: violated precondition that the caller controls.
struct usage_error : std::logic_error {
    using std::logic_error::logic_error;
};

// Model parameter outside its domain (p not in (0,1), non-integer q, ...).
struct parameter_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Instance too large for an exact routine's cap.
struct size_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Bisection predicate did not bracket a root.
struct bracket_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A retry loop ran out of attempts; carries the attempt count.
struct retry_exhausted : std::runtime_error {
    int attempts;
    retry_exhausted(const std::string& what, int attempts_)
        : std::runtime_error(what), attempts(attempts_) {}
};

// A runtime cap (step budget, population cap) was hit.
struct cap_exceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace rc
