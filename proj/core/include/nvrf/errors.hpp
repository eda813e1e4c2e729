#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace nvrf {

// Base of every error thrown by the library. The CLI maps ValidationError to
// exit code 2 and everything else to 3.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error
{
public:
  using Error::Error;
};

class InfeasibleSequence : public Error
{
public:
  using Error::Error;
};

class UnsupportedSequence : public Error
{
public:
  using Error::Error;
};

class RenderError : public Error
{
public:
  RenderError(std::string const &msg, std::size_t pulse)
    : Error(msg)
    , pulse_index(pulse)
  {
  }
  std::size_t pulse_index;
};

class ResolutionError : public Error
{
public:
  using Error::Error;
};

class UndefinedBandwidth : public Error
{
public:
  using Error::Error;
};

class UncalibratableError : public Error
{
public:
  using Error::Error;
};

class NonPhysicalDensity : public Error
{
public:
  using Error::Error;
};

class BoundaryPeakError : public Error
{
public:
  using Error::Error;
};

class AlignmentError : public Error
{
public:
  using Error::Error;
};

class InversionError : public Error
{
public:
  using Error::Error;
};

class IoError : public Error
{
public:
  using Error::Error;
};

class ValidationError : public Error
{
public:
  explicit ValidationError(std::vector<std::string> keys);
  std::vector<std::string> const &offending_keys() const { return keys_; }

private:
  std::vector<std::string> keys_;
};

} // namespace nvrf
