#pragma once

#include <stdexcept>
#include <string>

namespace infbandit {

// Bad argument supplied by the caller (out-of-domain mean, malformed spec...).
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// The requested quantity is not defined for this input (e.g. a mean outside
// the family's parameter space where a formula needs it).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Bucket partitions are only well-posed for continuous reservoirs.
class UnsupportedPartition : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Fewer than two arms in the pool, so there is no challenger to select.
class DegeneratePool : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace infbandit
