// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace effact {

/// Root of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad parameters handed to a constructor or generator.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Operands disagree in modulus, length, or basis.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Operand metadata (domain, order, representation, scale-deferred flag)
/// violates an operation's precondition.
class ContractError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& msg)
      : Error("line " + std::to_string(line) + ":" + std::to_string(column) +
              ": " + msg),
        line_(line),
        column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class CompileError : public Error {
 public:
  using Error::Error;
};

class ExecError : public Error {
 public:
  using Error::Error;
};

class SimError : public Error {
 public:
  using Error::Error;
};

}  // namespace effact
