#pragma once

#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>

namespace quadratura {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed formula text. Carries the byte offset of the offending token.
class ParseError : public Error {
 public:
  enum class Kind { syntax, unknown_identifier, arity };

  ParseError(Kind kind, std::size_t offset, const std::string& what)
      : Error(message(kind, offset, what)),
        kind_(kind),
        offset_(offset) {}

  Kind kind() const noexcept { return kind_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  static std::string message(Kind k, std::size_t offset, const std::string& what) {
    std::ostringstream os;
    os << label(k) << " at offset " << offset << ": " << what;
    return os.str();
  }

  static const char* label(Kind k) {
    switch (k) {
      case Kind::syntax: return "syntax error";
      case Kind::unknown_identifier: return "unknown identifier";
      case Kind::arity: return "arity mismatch";
    }
    return "parse error";
  }

  Kind kind_;
  std::size_t offset_;
};

/// Symbolic differentiation reached a node it cannot differentiate.
class NotDifferentiable : public Error {
 public:
  using Error::Error;
};

/// Invalid argument to a numerical routine (degenerate interval, n too small, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Request would exceed a hard resource cap.
class ResourceError : public Error {
 public:
  using Error::Error;
};

}  // namespace quadratura
