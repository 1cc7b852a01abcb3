#pragma once

#include <stdexcept>
#include <string>

namespace dast {

/// Bad argument or violated precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A requested object would exceed a configured size cap.
class SizeLimitError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// A numerical routine failed or produced an out-of-tolerance result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dast
