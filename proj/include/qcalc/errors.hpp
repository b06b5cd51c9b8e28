#pragma once

#include <stdexcept>
#include <string>

namespace qcalc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class NonFiniteEvaluation : public Error {
public:
    NonFiniteEvaluation(const std::string& what, double at)
        : Error(what), location(at) {}
    double location;
};

class NonConvergence : public Error {
public:
    using Error::Error;
};

class InvalidBracket : public Error {
public:
    using Error::Error;
};

class InfiniteMean : public Error {
public:
    using Error::Error;
};

class MissingDensity : public Error {
public:
    using Error::Error;
};

class NotStochasticallyOrdered : public Error {
public:
    NotStochasticallyOrdered(const std::string& what, double u, double excess)
        : Error(what), witness_u(u), violation(excess) {}
    double witness_u;
    double violation;  // Q_X(u) - Q_Y(u) at the witness
};

class EqualMeans : public Error {
public:
    using Error::Error;
};

class InsufficientDerivatives : public Error {
public:
    using Error::Error;
};

class NonMonotonePhi : public Error {
public:
    using Error::Error;
};

class HypothesisFailed : public Error {
public:
    HypothesisFailed(const std::string& what, double at, double excess)
        : Error(what), witness(at), violation(excess) {}
    double witness;
    double violation;
};

class InvalidSampleSize : public Error {
public:
    using Error::Error;
};

class QZero : public Error {
public:
    using Error::Error;
};

}  // namespace qcalc
