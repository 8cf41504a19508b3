#pragma once

#include <stdexcept>
#include <string>

namespace mobility {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file (bad JSON, wrong shape).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Structurally valid input that violates a documented invariant.
/// The message names the invariant and the offending entity.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Exact enumeration was requested above the supported size.
class InstanceTooLargeError : public Error {
public:
    using Error::Error;
};

/// A constrained optimization has an empty feasible set where the caller
/// required a solution (e.g. marginal economies inside payment computation).
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// Shared data inconsistent with the model (zero-probability evidence) or
/// a member received data outside the sharing protocol.
class ProtocolError : public Error {
public:
    using Error::Error;
};

/// True when the MOBILITY_LOG environment variable is set and non-empty.
bool log_enabled();

/// Writes one diagnostic line to stderr when logging is enabled.
void log_line(const std::string& line);

}  // namespace mobility
