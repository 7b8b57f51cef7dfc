#pragma once

#include <stdexcept>
#include <string>

namespace infoclock {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid constructor/operation arguments (violated preconditions).
class InvalidParams : public Error {
public:
    using Error::Error;
};

// CRRA problem with unbounded value function (t0/T <= (1-gamma)/gamma).
class IllPosedProblem : public Error {
public:
    using Error::Error;
};

// Correlation profile violates the finite-information assumption.
class InadmissibleProfile : public Error {
public:
    using Error::Error;
};

// Clock cannot be used here (e.g. insider marker where a finite clock is required).
class InadmissibleClock : public Error {
public:
    using Error::Error;
};

// Query outside the domain of a clock or coefficient grid.
class OutOfDomain : public Error {
public:
    using Error::Error;
};

// A numeric kernel met a non-finite value.
class NonFinite : public Error {
public:
    using Error::Error;
};

// Root bracket without a sign change.
class NoSignChange : public Error {
public:
    using Error::Error;
};

// Shooting bracket expansion failed.
class NoBracket : public Error {
public:
    using Error::Error;
};

// Rolling-correlation window with zero realized variance.
class DegenerateWindow : public Error {
public:
    using Error::Error;
};

// CRRA (gamma < 1) trajectory approaching the singular denominator.
class NearSingular : public Error {
public:
    using Error::Error;
};

// Utility evaluated outside its domain (nonpositive wealth for CRRA/log).
class DomainError : public Error {
public:
    using Error::Error;
};

// Malformed configuration input.
class ConfigError : public Error {
public:
    using Error::Error;
};

// A solver failed to converge.
class SolverFailure : public Error {
public:
    using Error::Error;
};

} // namespace infoclock
