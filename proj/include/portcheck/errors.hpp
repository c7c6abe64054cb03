// Copyright 2026 The portcheck Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PORTCHECK_ERRORS_HPP_
#define PORTCHECK_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace portcheck {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Litmus text that does not match the grammar.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : Error("line " + std::to_string(line) + ", column " +
              std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// A document or value breaks a structural invariant (schema, dangling
/// label, po cycle, incompatible labels, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Relations over different universes were combined.
class UniverseMismatch : public Error {
 public:
  using Error::Error;
};

/// Enumeration would exceed the configured event cap.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

/// An operation was called outside its precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace portcheck

#endif  // PORTCHECK_ERRORS_HPP_
