#pragma once

#include <stdexcept>
#include <string>

namespace normalis {

/// Precondition violated by the caller (bad argument, mismatched sizes).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input is well-formed but geometrically degenerate (collinear points,
/// empty candidate sets, all-zero confusion counts).
class DegenerateInput : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed or unreadable file content.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File system failure (missing file, unwritable path).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace normalis
