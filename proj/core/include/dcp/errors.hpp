#pragma once

#include <stdexcept>
#include <string>

namespace dcp {

// Invalid argument values (non-finite rates, bad intervals, mesh mismatch, ...).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// An operation that needs at least one data point received none.
class EmptyInputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Requested resolution level is not representable (J > L, n too small).
class ResolutionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Fewer samples than the estimator order requires.
class InsufficientDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An estimate exists only in a degenerate limit (e.g. no nonzero increments).
class DegenerateEstimateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The whole Monte Carlo experiment failed (e.g. every replicate degenerate).
class ExperimentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace dcp
