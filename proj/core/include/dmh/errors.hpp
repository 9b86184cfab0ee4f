#pragma once

#include <stdexcept>
#include <string>

namespace dmh {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller broke a precondition (shape mismatch, index out of range, ...).
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// Input data is unusable (non-finite entries, empty matrices).
class InputError : public Error {
public:
    using Error::Error;
};

/// A configuration value is out of its admissible range.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A file could not be opened, read, or written.
class FileError : public Error {
public:
    using Error::Error;
};

/// A file was readable but its contents do not follow the format.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Dataset-level validation failure (row-count mismatch, no labelled rows).
class DataError : public Error {
public:
    using Error::Error;
};

/// Metric undefined for the given inputs (empty relevant set, no valid query).
class EvaluationError : public Error {
public:
    using Error::Error;
};

/// Training produced a non-finite objective.
class DivergedError : public Error {
public:
    DivergedError(int iteration, const std::string& what)
        : Error(what), iteration_(iteration) {}

    int iteration() const noexcept { return iteration_; }

private:
    int iteration_;
};

}  // namespace dmh
