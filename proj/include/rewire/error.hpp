#ifndef REWIRE_ERROR_HPP
#define REWIRE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace rewire {

// Every failure raised by the library derives from Error so callers (the CLI
// in particular) can catch one type and map it to an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class RejectedAction : public Error {
 public:
  using Error::Error;
};

class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// Input lies outside the mathematical domain of the quantity (e.g. the
/// effective resistance of a disconnected graph).
class DomainError : public Error {
 public:
  using Error::Error;
};

class EmptyActionSpace : public Error {
 public:
  using Error::Error;
};

class OracleFailure : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class IntegrityError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class InvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace rewire

#endif  // REWIRE_ERROR_HPP
