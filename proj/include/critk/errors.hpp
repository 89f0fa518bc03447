#pragma once
#include <stdexcept>
#include <string>

namespace critk {

// Failure categories thrown across the library. All derive from Error so
// callers can catch broadly; the CLI maps any Error to exit status 1.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input text (carries the offending line number in the message).
struct ParseError : Error {
    using Error::Error;
};

// A numeric value outside its documented domain, e.g. an edge weight not in [0,1].
struct RangeError : Error {
    using Error::Error;
};

// Structural violations: self-loops, duplicate edges, duplicate node names.
struct StructureError : Error {
    using Error::Error;
};

// Graph/model mismatch, e.g. linear-threshold semantics on a graph whose
// incoming weights sum above 1.
struct ModelError : Error {
    using Error::Error;
};

// Reference to a node that is not part of the graph.
struct LookupError : Error {
    using Error::Error;
};

// Invalid configuration (thresholds, fractions, combination weights, schedules).
struct ConfigError : Error {
    using Error::Error;
};

// Instance too large for an exact or exhaustive routine.
struct SizeError : Error {
    using Error::Error;
};

// A coalition handed to a game that is not a subset of its ground set.
struct DomainError : Error {
    using Error::Error;
};

}  // namespace critk
