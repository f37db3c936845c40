#pragma once

#include <stdexcept>
#include <string>

namespace freqmark {

// Base class for all library errors. CLI maps these to exit code 1,
// usage/parse problems to exit code 2.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Remote backend could not be reached (timeout, connection, auth, 5xx).
class BackendUnavailableError : public Error {
public:
    using Error::Error;
};

// Context exceeds the backend's window.
class ContextTooLongError : public Error {
public:
    using Error::Error;
};

// Guiding signal violates its invariants (range, constancy, length).
class InvalidSignalError : public Error {
public:
    using Error::Error;
};

// Backend returned fewer candidates than the rank the signal demands.
class InsufficientCandidatesError : public Error {
public:
    using Error::Error;
};

// External text transformer failed (non-zero exit, line-count mismatch).
class TransformerFailedError : public Error {
public:
    using Error::Error;
};

// Inputs too short for the requested attack segment lengths.
class InputTooShortError : public Error {
public:
    using Error::Error;
};

// Metric preconditions violated (empty class, degenerate ground truth).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

} // namespace freqmark
