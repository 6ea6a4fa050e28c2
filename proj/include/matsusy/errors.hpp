#pragma once

#include <stdexcept>
#include <string>

namespace matsusy {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Evaluation point sits on (or numerically at) a singularity of some entry.
class PoleError : public Error {
public:
    using Error::Error;
};

/// Point or interval outside the real-analytic window of a model.
class DomainError : public Error {
public:
    using Error::Error;
};

class SingularMatrixError : public Error {
public:
    using Error::Error;
};

/// The difference W_k^2 + W_k' - (W_{k+1}^2 - W_{k+1}') is not a constant multiple of I.
class NotShapeInvariantError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Solution growth during zero-mode integration exceeded the overflow guard.
class StiffnessError : public Error {
public:
    using Error::Error;
};

class EmptyLadderError : public Error {
public:
    using Error::Error;
};

class ZeroNormError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace matsusy
