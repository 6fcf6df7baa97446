// Error types and small string helpers shared across the library.
#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace scl {

// Raised when an input file violates its format grammar. The message always
// names the file and, where applicable, the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Raised for contract violations: size mismatches, bad configuration values,
// missing labels, and similar caller errors.
class InvalidArgument : public std::invalid_argument {
 public:
  explicit InvalidArgument(const std::string& what) : std::invalid_argument(what) {}
};

namespace detail {

template <typename... Args>
std::string concat(Args&&... args) {
  std::ostringstream out;
  (out << ... << args);
  return out.str();
}

}  // namespace detail

template <typename... Args>
[[noreturn]] void fail_parse(Args&&... args) {
  throw ParseError(detail::concat(std::forward<Args>(args)...));
}

template <typename... Args>
[[noreturn]] void fail_arg(Args&&... args) {
  throw InvalidArgument(detail::concat(std::forward<Args>(args)...));
}

}  // namespace scl
