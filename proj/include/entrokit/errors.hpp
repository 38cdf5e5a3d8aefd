#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace entrokit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// A state or argument lies outside the domain of a fundamental relation.
class DomainError : public Error
{
public:
  using Error::Error;
};

/// A requested entropy value is not attained at the given parameters.
class RangeError : public Error
{
public:
  using Error::Error;
};

/// A thermal reservoir cannot absorb an energy exchange within its finite range.
class RangeExceeded : public Error
{
public:
  using Error::Error;
};

class NegativeAmount : public Error
{
public:
  NegativeAmount(std::size_t index, double value);
  std::size_t index() const { return index_; }

private:
  std::size_t index_;
};

/// A composition cannot be formed from the elemental species of a reference environment.
class NotExpressible : public Error
{
public:
  using Error::Error;
};

/// Two reversible processes between states of equal entropy exchange no energy,
/// so an energy-change ratio is undefined.
class DegenerateStates : public Error
{
public:
  using Error::Error;
};

class NotWeightProcess : public Error
{
public:
  using Error::Error;
};

class Infeasible : public Error
{
public:
  using Error::Error;
};

class NonConvergence : public Error
{
public:
  using Error::Error;
};

class ParseError : public Error
{
public:
  ParseError(const std::string& what, int line = -1, int column = -1);
  int line() const { return line_; }
  int column() const { return column_; }

private:
  int line_;
  int column_;
};

class IntegrityError : public Error
{
public:
  IntegrityError(const std::string& what, std::string reference);
  const std::string& reference() const { return reference_; }

private:
  std::string reference_;
};

} // namespace entrokit
