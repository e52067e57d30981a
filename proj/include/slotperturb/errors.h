#ifndef SLOTPERTURB_ERRORS_H_
#define SLOTPERTURB_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace slotperturb {

// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text. line() is 1-based; 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string &message, std::size_t line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + message
                       : message),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Well-formed input that violates a dataset-level rule (duplicate ids etc).
class StructuralError : public Error {
 public:
  using Error::Error;
};

// BIO tag sequence violates the B/I/O grammar.
class BioError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Bad or missing configuration / resource setup.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// An operator could not run on its input.
class OperatorError : public Error {
 public:
  using Error::Error;
};

// A candidate provider failed; what() carries its diagnostics.
class ProviderError : public OperatorError {
 public:
  using OperatorError::OperatorError;
};

// Predictions and gold data do not line up.
class JoinError : public Error {
 public:
  using Error::Error;
};

}  // namespace slotperturb

#endif  // SLOTPERTURB_ERRORS_H_
