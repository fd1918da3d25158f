#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace oneill {

// Malformed user input: grammar, schema, undeclared names, bad parameters.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public InputError {
 public:
  ParseError(std::string const& message, std::size_t offset)
      : InputError(message + " at offset " + std::to_string(offset)),
        offset_(offset) {}

  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Evaluation outside the domain of an elementary function.
class DomainError : public std::runtime_error {
 public:
  DomainError(std::string const& message, std::string subexpression)
      : std::runtime_error(message + " in `" + subexpression + "`"),
        message_(message),
        subexpression_(std::move(subexpression)) {}

  std::string const& message() const { return message_; }
  std::string const& subexpression() const { return subexpression_; }

 private:
  std::string message_;
  std::string subexpression_;
};

// Singular metric, rank-deficient projection, broken frame, or a map that is
// not a Riemannian submersion. Not a tolerance issue.
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace oneill
