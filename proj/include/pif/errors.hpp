#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pif {

// Invalid argument values (non-finite inputs, out-of-range exponents, ...).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Operation called outside its precondition (e.g. infinite deaths without a policy).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Text input that cannot be parsed. Carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Parsed input that violates a domain invariant (birth > death, dangling ids, ...).
class ValidationError : public std::runtime_error {
 public:
  ValidationError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// A size budget of a bounded solver was exceeded.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A spectral embedding has no positive directions to embed into.
class EmbeddingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pif
