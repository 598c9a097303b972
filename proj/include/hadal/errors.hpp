#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hadal {

/// Base class for every error raised by the simulator and its control stack.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A vehicle step produced NaN or infinity (usually a parameter blow-up).
class NonFiniteState : public Error {
 public:
  using Error::Error;
};

/// Grasp attempted while the object is farther than the allowed gap.
class AttachRejected : public Error {
 public:
  AttachRejected(double gap, double max_gap);
  double gap() const { return gap_; }

 private:
  double gap_;
};

class NotAttached : public Error {
 public:
  NotAttached() : Error("object is not attached") {}
};

class AlreadyAttached : public Error {
 public:
  AlreadyAttached() : Error("object is already attached") {}
};

class RankDeficientLayout : public Error {
 public:
  using Error::Error;
};

class Unreachable : public Error {
 public:
  using Error::Error;
};

class JointLimitViolation : public Error {
 public:
  using Error::Error;
};

class DegenerateBounds : public Error {
 public:
  using Error::Error;
};

class InvalidTransition : public Error {
 public:
  using Error::Error;
};

class UnreachableFromHover : public Error {
 public:
  using Error::Error;
};

/// Scenario text could not be parsed, or contains a key the format does not know.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line = -1, int column = -1);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// A configuration value violates a named invariant.
class ValidationError : public Error {
 public:
  ValidationError(std::string invariant, const std::string& detail);
  const std::string& invariant() const { return invariant_; }

 private:
  std::string invariant_;
};

class IncompleteLog : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace hadal
