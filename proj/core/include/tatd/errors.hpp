#pragma once

#include <stdexcept>
#include <string>

namespace tatd {

/// Base class for every error raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file row (wrong column count, non-numeric field, ...).
class ParseError : public Error {
public:
    using Error::Error;
};

/// The same index tuple appears more than once in a tensor.
class DuplicateEntryError : public Error {
public:
    using Error::Error;
};

/// Data that cannot be normalized (zero variance, too few values).
class DegenerateDataError : public Error {
public:
    using Error::Error;
};

/// Too few entries for the requested operation (e.g. an 8:1:1 split).
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

/// Smoothing window is even or below the minimum size.
class InvalidWindowError : public Error {
public:
    using Error::Error;
};

/// A kernel weight vector was requested for an empty neighborhood.
class InvalidNeighborhoodError : public Error {
public:
    using Error::Error;
};

/// Index tuple outside the tensor or model dimensions.
class IndexError : public Error {
public:
    using Error::Error;
};

/// Model and tensor shapes do not match.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Metrics were requested over an empty entry set.
class EmptyEvaluationError : public Error {
public:
    using Error::Error;
};

/// A row-wise normal system is singular and no ridge term is present.
class SingularUpdateError : public Error {
public:
    using Error::Error;
};

/// Training produced a non-finite loss or gradient.
class DivergenceError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration value (bad strategy name, non-positive rate, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// File could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace tatd
