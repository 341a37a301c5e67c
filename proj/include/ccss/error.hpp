#pragma once

#include <stdexcept>
#include <string>

namespace ccss {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& msg, int line, int column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Unbound variable or undeclared range in a process file.
class ScopeError : public Error {
 public:
  using Error::Error;
};

class UnknownAgent : public Error {
 public:
  using Error::Error;
};

class ArityMismatch : public Error {
 public:
  using Error::Error;
};

/// More than one defining equation matches an instantiated agent.
class AmbiguousAgent : public Error {
 public:
  using Error::Error;
};

class UnguardedRecursion : public Error {
 public:
  using Error::Error;
};

class DynamicParallelism : public Error {
 public:
  using Error::Error;
};

class TruncatedInput : public Error {
 public:
  using Error::Error;
};

class ParameterOutOfRange : public Error {
 public:
  using Error::Error;
};

class InvalidLasso : public Error {
 public:
  using Error::Error;
};

}  // namespace ccss
