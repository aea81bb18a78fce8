#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rewrite_arena {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed s-expression, ruleset line, or suite file. `offset()` is a byte
/// offset into the text that was being parsed.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& message);
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class ArityError : public Error {
 public:
  ArityError(std::string symbol, std::size_t expected, std::size_t actual);
  const std::string& symbol() const noexcept { return symbol_; }

 private:
  std::string symbol_;
};

class InvalidPosition : public Error {
 public:
  using Error::Error;
};

class UnboundVariable : public Error {
 public:
  using Error::Error;
};

/// Raised by cost models: unbound matrix leaf, dimension mismatch.
class CostError : public Error {
 public:
  using Error::Error;
};

}  // namespace rewrite_arena
