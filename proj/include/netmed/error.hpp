#pragma once

#include <stdexcept>
#include <string>

namespace netmed {

// Bad arguments or data that violate an operation's preconditions.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed input file; carries the 1-based line number where parsing failed.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Chain with no variability where a diagnostic needs some.
class DegenerateChainError : public std::runtime_error {
 public:
  DegenerateChainError() : std::runtime_error("degenerate chain") {}
};

}  // namespace netmed
