#pragma once

#include <stdexcept>
#include <string>

namespace spoiler {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidRestriction : public Error {
  using Error::Error;
};

class DimensionError : public Error {
  using Error::Error;
};

class DomainError : public Error {
  using Error::Error;
};

class TieResolutionError : public Error {
  using Error::Error;
};

class EnumerationInfeasible : public Error {
  using Error::Error;
};

class DegenerateInput : public Error {
  using Error::Error;
};

class CoincidentPoint : public Error {
  using Error::Error;
};

class ConfigError : public Error {
  using Error::Error;
};

class ParseError : public Error {
  using Error::Error;
};

}  // namespace spoiler
