#pragma once

#include <stdexcept>
#include <string>

namespace lle {

/// Base of every error the library throws. Subclasses group failures by the
/// caller's likely remedy; the CLI maps them to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unreadable, unwritable or missing files.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Well-formed I/O but content the library does not accept.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Extent or channel disagreement between operands.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A caller-supplied argument outside the operation's domain.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

class CheckpointError : public Error {
 public:
  using Error::Error;
};

class DatasetError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values or numerically degenerate statistics.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Misuse of the differentiation graph (e.g. a second backward pass).
class GraphError : public Error {
 public:
  using Error::Error;
};

}  // namespace lle
