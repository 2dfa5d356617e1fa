#pragma once

#include <stdexcept>
#include <string>

namespace sj {

// Input outside the mathematical domain of an operation (rational theta for
// Phi, bad index ranges, malformed literals, ...). CLI exit code 2.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A configured cap (iterations, precision bits, work budget) was reached
// before the requested guarantee could be met. CLI exit code 3.
class ResourceExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PrecisionExhausted : public ResourceExhausted {
public:
    using ResourceExhausted::ResourceExhausted;
};

// A proven invariant failed to hold; always indicates a bug.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace sj
