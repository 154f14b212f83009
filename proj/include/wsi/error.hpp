#pragma once

#include <stdexcept>
#include <string>

namespace wsi {

// Base of every error the library throws. Callers that want to keep going
// past a bad word catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad or inconsistent configuration (empty corpus, fixnc without a count...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Input text that cannot be parsed. Carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Parsed input that violates a data invariant.
class ValidationError : public Error {
 public:
  ValidationError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  explicit ValidationError(const std::string& what) : Error(what), line_(0) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// No usable substitutes for an occurrence (empty distribution, empty
// intersection in the Bayesian combination, everything excluded).
class NoSubstitutesError : public Error {
 public:
  using Error::Error;
};

}  // namespace wsi
