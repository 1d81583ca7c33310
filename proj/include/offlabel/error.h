#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace offlabel {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input that violates a documented contract (bad file, bad flag, unknown id).
// The CLI maps these to exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A malformed record in a line-delimited input file.
class LoadError : public ValidationError {
 public:
  LoadError(const std::string& file, std::size_t line, const std::string& what)
      : ValidationError(file + ":" + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class UnknownIdError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class UndefinedSimilarityError : public Error {
 public:
  using Error::Error;
};

// The model endpoint rejected our credential; the run must stop.
class AuthError : public Error {
 public:
  using Error::Error;
};

class TransportError : public Error {
 public:
  using Error::Error;
};

}  // namespace offlabel
