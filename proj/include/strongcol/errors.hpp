#pragma once

#include <stdexcept>
#include <string>

namespace strongcol {

/// Base of every error thrown by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameters (probabilities outside [0,1], infeasible sizes, ...).
class ConfigError : public Error
{
public:
    using Error::Error;
};

/// Operation called outside its domain (empty graph, u == v, adjacent pins).
class DomainError : public Error
{
public:
    using Error::Error;
};

/// Algorithm precondition not met by the instance (part sizes too small).
class PreconditionError : public Error
{
public:
    using Error::Error;
};

/// Exponential search refused because the instance exceeds its size guard.
class SizeError : public Error
{
public:
    using Error::Error;
};

/// Malformed graph / partition / certificate file.
class FormatError : public Error
{
public:
    using Error::Error;
};

} // namespace strongcol
