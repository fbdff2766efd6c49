#pragma once

#include <stdexcept>
#include <string>

namespace conerad {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

/// A vector or field contained NaN or an infinity.
class NonFiniteError : public Error {
public:
    using Error::Error;
};

/// An order bound u was zero, or not strictly positive where required.
class DegenerateBoundError : public Error {
public:
    using Error::Error;
};

/// A map produced output outside the cone, or violated a structural
/// property it was required to have (order preservation, homogeneity).
class MapContractError : public Error {
public:
    using Error::Error;
};

/// lambda does not lie above the cone spectral radius.
class SpectralDomainError : public Error {
public:
    using Error::Error;
};

/// The min-iteration collapsed to zero: the radius guess was too large.
class ZeroLimitError : public Error {
public:
    using Error::Error;
};

/// The monotone refinement diverged in u-norm: the radius guess was too small.
class ScaleError : public Error {
public:
    using Error::Error;
};

class FieldError : public Error {
public:
    using Error::Error;
};

class ModelContractError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration; the message starts with the offending field path.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace conerad
